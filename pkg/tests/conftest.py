"""Shared builders for in-memory corpora used across the test suite."""

from traitline.corpus import Corpus, TweetRecord, UserRecord, parse_timestamp

SNAP = parse_timestamp("2022-01-01T00:00:00Z")


def make_user(user_id, created="2020-01-01T00:00:00Z", followers=10,
              following=100, tweets=1462, listed=3, verified=False,
              default_pic=True, bio=None, lang="en", snapshot=None):
    return UserRecord(
        user_id=user_id, created_at=parse_timestamp(created),
        followers_count=followers, following_count=following,
        tweet_count=tweets, listed_count=listed, verified=verified,
        has_default_pic=default_pic, bio=bio, predominant_language=lang,
        snapshot_at=SNAP if snapshot is None else parse_timestamp(snapshot))


def make_tweet(tweet_id, author, ts, kind="original", text="", hashtags=(),
               urls=(), mentions=(), retweeted_author=None, lang=None):
    return TweetRecord(
        tweet_id=tweet_id, author_id=author, created_at=ts, kind=kind,
        text=text, hashtags=tuple(hashtags), urls=tuple(urls),
        mentions=tuple(mentions), retweeted_author=retweeted_author,
        lang=lang)


def make_corpus(users=(), timelines=None, likes=(), follows=(), seeds=()):
    users = list(users)
    return Corpus(
        users={u.user_id: u for u in users},
        timelines=dict(timelines or {}),
        likes=list(likes), follows=list(follows), seeds=list(seeds))
