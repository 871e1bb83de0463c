import json

import pytest

from conftest import make_corpus, make_tweet, make_user
from traitline.corpus import (CorpusError, CorpusPaths, load_corpus,
                              parse_timestamp, record_counts, save_corpus,
                              validate_corpus)


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def user_row(user_id, **overrides):
    row = {"user_id": user_id, "created_at": "2020-01-01T00:00:00Z",
           "followers_count": 10, "following_count": 20, "tweet_count": 5,
           "listed_count": 0, "verified": False, "has_default_pic": False,
           "bio": "hello", "predominant_language": "en",
           "snapshot_at": "2022-01-01T00:00:00Z"}
    row.update(overrides)
    return row


def tweet_row(tweet_id, author, created, **overrides):
    row = {"tweet_id": tweet_id, "author_id": author, "created_at": created,
           "kind": "original", "text": "hi there", "hashtags": [],
           "urls": [], "mentions": [], "retweeted_author": None}
    row.update(overrides)
    return row


def write_fixture(tmp_path, users, tweets, likes=(), follows=(), seeds=()):
    paths = CorpusPaths.in_dir(tmp_path)
    write_jsonl(paths.users, users)
    write_jsonl(paths.tweets, tweets)
    write_jsonl(paths.likes, likes)
    write_jsonl(paths.follows, follows)
    with open(paths.seeds, "w") as fh:
        json.dump(list(seeds), fh)
    return paths


def test_two_user_fixture(tmp_path):
    paths = write_fixture(
        tmp_path,
        users=[user_row("u1"), user_row("u2")],
        tweets=[tweet_row("t1", "u1", "2021-05-01T00:00:00Z"),
                tweet_row("t2", "u1", "2021-05-02T00:00:00Z"),
                tweet_row("t3", "u2", "2021-06-01T00:00:00Z")],
        seeds=["s1"])
    corpus = load_corpus(paths)
    assert set(corpus.users) == {"u1", "u2"}
    assert [t.tweet_id for t in corpus.timeline("u1")] == ["t1", "t2"]
    assert record_counts(corpus) == {"users": 2, "tweets": 3, "likes": 0,
                                     "follows": 0, "seeds": 1}


def test_out_of_order_timestamps_resorted(tmp_path):
    paths = write_fixture(
        tmp_path,
        users=[user_row("u1")],
        tweets=[tweet_row("t2", "u1", "2021-05-02T00:00:00Z"),
                tweet_row("t1", "u1", "2021-05-01T00:00:00Z")],
        seeds=["s1"])
    corpus = load_corpus(paths)
    stamps = [t.created_at for t in corpus.timeline("u1")]
    assert stamps == sorted(stamps)
    assert [t.tweet_id for t in corpus.timeline("u1")] == ["t1", "t2"]


def test_equal_timestamps_tie_break_by_tweet_id(tmp_path):
    paths = write_fixture(
        tmp_path,
        users=[user_row("u1")],
        tweets=[tweet_row("tb", "u1", "2021-05-01T00:00:00Z"),
                tweet_row("ta", "u1", "2021-05-01T00:00:00Z")],
        seeds=["s1"])
    corpus = load_corpus(paths)
    assert [t.tweet_id for t in corpus.timeline("u1")] == ["ta", "tb"]


def test_missing_user_id_reports_line(tmp_path):
    bad = user_row("u1")
    del bad["user_id"]
    paths = write_fixture(tmp_path, users=[user_row("u0"), bad], tweets=[],
                          seeds=["s1"])
    with pytest.raises(CorpusError, match="missing field user_id at line 2"):
        load_corpus(paths)


def test_malformed_line_reports_file_and_line(tmp_path):
    paths = write_fixture(tmp_path, users=[user_row("u1")], tweets=[],
                          seeds=["s1"])
    with open(paths.tweets, "w") as fh:
        fh.write("{not json\n")
    with pytest.raises(CorpusError, match="tweets.jsonl.*line 1"):
        load_corpus(paths)


def test_duplicate_tweet_id_rejected(tmp_path):
    paths = write_fixture(
        tmp_path,
        users=[user_row("u1")],
        tweets=[tweet_row("t1", "u1", "2021-05-01T00:00:00Z"),
                tweet_row("t1", "u1", "2021-05-02T00:00:00Z")],
        seeds=["s1"])
    with pytest.raises(CorpusError, match="duplicate tweet_id t1"):
        load_corpus(paths)


def test_duplicate_user_id_rejected(tmp_path):
    paths = write_fixture(tmp_path, users=[user_row("u1"), user_row("u1")],
                          tweets=[], seeds=["s1"])
    with pytest.raises(CorpusError, match="duplicate user_id"):
        load_corpus(paths)


def test_hashtags_lowercased_and_deduplicated(tmp_path):
    paths = write_fixture(
        tmp_path, users=[user_row("u1")],
        tweets=[tweet_row("t1", "u1", "2021-05-01T00:00:00Z",
                          hashtags=["#Covid19", "covid19", "NEWS"])],
        seeds=["s1"])
    corpus = load_corpus(paths)
    assert corpus.timeline("u1")[0].hashtags == ("covid19", "news")


def test_timestamps_normalized_to_utc(tmp_path):
    paths = write_fixture(
        tmp_path, users=[user_row("u1")],
        tweets=[tweet_row("t1", "u1", "2021-05-01T12:00:00+02:00")],
        seeds=["s1"])
    corpus = load_corpus(paths)
    assert corpus.timeline("u1")[0].created_at == \
        parse_timestamp("2021-05-01T10:00:00Z")


def test_created_after_snapshot_rejected(tmp_path):
    paths = write_fixture(
        tmp_path,
        users=[user_row("u1", created_at="2023-01-01T00:00:00Z")],
        tweets=[], seeds=["s1"])
    with pytest.raises(CorpusError, match="created_at after snapshot_at"):
        load_corpus(paths)


def test_negative_count_rejected(tmp_path):
    paths = write_fixture(tmp_path,
                          users=[user_row("u1", followers_count=-1)],
                          tweets=[], seeds=["s1"])
    with pytest.raises(CorpusError, match="followers_count < 0"):
        load_corpus(paths)


def test_unknown_kind_rejected(tmp_path):
    paths = write_fixture(
        tmp_path, users=[user_row("u1")],
        tweets=[tweet_row("t1", "u1", "2021-05-01T00:00:00Z", kind="boost")],
        seeds=["s1"])
    with pytest.raises(CorpusError, match="unknown kind"):
        load_corpus(paths)


def test_missing_file_rejected(tmp_path):
    with pytest.raises(CorpusError, match="missing corpus file"):
        load_corpus(CorpusPaths.in_dir(tmp_path))


def test_load_is_deterministic(tmp_path):
    paths = write_fixture(
        tmp_path, users=[user_row("u1"), user_row("u2")],
        tweets=[tweet_row("t1", "u1", "2021-05-01T00:00:00Z")],
        likes=[{"user_id": "u1", "seed_id": "s1", "liked_tweet_id": "x"}],
        follows=[{"follower_id": "u1", "followee_id": "s1"}],
        seeds=["s1"])
    assert load_corpus(paths) == load_corpus(paths)


def test_round_trip(tmp_path):
    corpus = make_corpus(
        users=[make_user("u1", bio="hey there"), make_user("u2", lang="it")],
        timelines={"u1": [
            make_tweet("t1", "u1", 1000, kind="retweet",
                       text="rt @x: hello", hashtags=("news",),
                       urls=("https://a.example/x",), mentions=("x",),
                       retweeted_author="x"),
            make_tweet("t2", "u1", 2000, text="ciao", lang="it")]},
        likes=[("u1", "s1", "p1")], follows=[("u1", "s1")], seeds=["s1"])
    out = tmp_path / "rt"
    paths = CorpusPaths.in_dir(out)
    save_corpus(corpus, paths)
    reloaded = load_corpus(paths)
    assert reloaded == corpus
    # byte-stable second write
    save_corpus(reloaded, CorpusPaths.in_dir(tmp_path / "rt2"))
    for name in ("users.jsonl", "tweets.jsonl", "likes.jsonl",
                 "follows.jsonl", "seeds.json"):
        assert (out / name).read_bytes() == (tmp_path / "rt2" / name).read_bytes()


# ---- validation ------------------------------------------------------------

def consistent_corpus():
    return make_corpus(
        users=[make_user("u1"), make_user("u2")],
        timelines={"u1": [make_tweet("t1", "u1", 1000)],
                   "u2": [make_tweet("t2", "u2", 1000, kind="retweet",
                                     retweeted_author="x")]},
        likes=[("u1", "s1", "p1")],
        follows=[("u1", "s1"), ("u2", "u1")],
        seeds=["s1"])


def test_validate_consistent_corpus_is_empty():
    report = validate_corpus(consistent_corpus())
    assert report.is_empty()


def test_validate_flags_dangling_like():
    corpus = consistent_corpus()
    corpus.likes.append(("u1", "unknown_seed", "p9"))
    report = validate_corpus(corpus)
    assert report.dangling_likes == [("u1", "unknown_seed", "p9")]


def test_validate_flags_dangling_follow():
    corpus = consistent_corpus()
    corpus.follows.append(("ghost", "s1"))
    corpus.follows.append(("u1", "nowhere"))
    report = validate_corpus(corpus)
    assert ("ghost", "s1") in report.dangling_follows
    assert ("u1", "nowhere") in report.dangling_follows


def test_validate_flags_empty_timeline():
    corpus = make_corpus(users=[make_user("u1"), make_user("u2")],
                         timelines={"u1": [make_tweet("t1", "u1", 1)]},
                         seeds=["s1"])
    assert validate_corpus(corpus).empty_timelines == ["u2"]


def test_validate_flags_retweet_missing_author():
    corpus = make_corpus(
        users=[make_user("u1")],
        timelines={"u1": [make_tweet("t1", "u1", 1, kind="retweet")]},
        seeds=["s1"])
    assert validate_corpus(corpus).retweets_missing_author == ["t1"]


def test_validate_does_not_mutate():
    corpus = consistent_corpus()
    before = (dict(corpus.users), {k: list(v) for k, v in
                                   corpus.timelines.items()},
              list(corpus.likes), list(corpus.follows), list(corpus.seeds))
    validate_corpus(corpus)
    assert (corpus.users, corpus.timelines, corpus.likes, corpus.follows,
            corpus.seeds) == (before[0], before[1], before[2], before[3],
                              before[4])


def test_predominant_language_fallback():
    corpus = make_corpus(
        users=[make_user("u1", lang=None)],
        timelines={"u1": [make_tweet("t1", "u1", 1, lang="it"),
                          make_tweet("t2", "u1", 2, lang="it"),
                          make_tweet("t3", "u1", 3, lang="en")]},
        seeds=["s1"])
    assert corpus.predominant_language("u1") == "it"
