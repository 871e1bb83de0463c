"""Per-user behavioral feature extraction from profile metadata and timelines.

92 columns in a fixed order, split across three trait groups:

* credibility (17): profile metadata scalars and binaries;
* initiative (19): activity-mix ratios plus the distribution summaries of
  per-tweet unique-word counts and of consecutive-pair token entropy;
* adaptability (56): distribution summaries of language novelty,
  inter-post gaps (overall / retweets / mention posts), per-author retweet
  counts, per-domain URL counts, and per-tweet word and character counts.

Missing values (empty sub-streams, empty timelines) are NaN in the matrix
and empty cells in the CSV; imputation happens at training time.
"""

from __future__ import annotations

import csv
import logging
import math
import re
import unicodedata
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from urllib.parse import urlsplit

import numpy as np

from .corpus import Corpus, TweetRecord
from .statkit import PARAM_NAMES, dist_params, entropy_from_counts

logger = logging.getLogger(__name__)

TOKENIZER_VERSION = "1"

URL_TOKEN = "⟨url⟩"
MENTION_TOKEN = "⟨mention⟩"
PLACEHOLDER_TOKENS = frozenset((URL_TOKEN, MENTION_TOKEN))

_SPECIAL_RE = re.compile(r"(?P<url>https?://\S+|www\.\S+)|(?P<mention>@\w+)",
                         re.IGNORECASE)
_WORD_RE = re.compile(r"[^\W_]+")
_HASHTAG_RE = re.compile(r"#\w+")
_URL_RE = re.compile(r"https?://\S+|www\.\S+", re.IGNORECASE)
_SENTENCE_SPLIT_RE = re.compile(r"[.!?]+")

SECONDS_PER_DAY = 86400.0


class FeatureError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    """Lowercased token list; URLs and @mentions become placeholder tokens.

    Text is NFC-normalized, then split on runs of non-alphanumeric
    characters (underscores separate too). Empty tokens are dropped.
    """
    if not text:
        return []
    text = unicodedata.normalize("NFC", text)
    tokens: list[str] = []
    pos = 0
    for match in _SPECIAL_RE.finditer(text):
        tokens.extend(t.lower() for t in _WORD_RE.findall(text[pos:match.start()]))
        tokens.append(URL_TOKEN if match.lastgroup == "url" else MENTION_TOKEN)
        pos = match.end()
    tokens.extend(t.lower() for t in _WORD_RE.findall(text[pos:]))
    return tokens


def registered_domain(url: str) -> str | None:
    """Hostname with a leading "www." stripped; None when unparseable."""
    try:
        host = urlsplit(url).hostname
    except ValueError:
        return None
    if not host:
        return None
    if host.startswith("www."):
        host = host[4:]
    return host or None


@dataclass(frozen=True)
class TokenizedTweet:
    tokens: tuple[str, ...]
    is_reply: bool
    is_retweet: bool
    is_quote: bool
    has_url: bool
    has_mention: bool
    timestamp: int
    urls: tuple[str, ...]
    n_chars: int
    retweeted_author: str | None


def tokenize_tweet(tweet: TweetRecord) -> TokenizedTweet:
    tokens = tuple(tokenize(tweet.text))
    return TokenizedTweet(
        tokens=tokens,
        is_reply=tweet.kind == "reply",
        is_retweet=tweet.kind == "retweet",
        is_quote=tweet.kind == "quote",
        has_url=bool(tweet.urls) or URL_TOKEN in tokens,
        has_mention=bool(tweet.mentions) or MENTION_TOKEN in tokens,
        timestamp=tweet.created_at,
        urls=tuple(tweet.urls),
        n_chars=len(tweet.text),
        retweeted_author=tweet.retweeted_author,
    )


def tokenize_timeline(timeline: list[TweetRecord]) -> list[TokenizedTweet]:
    return [tokenize_tweet(t) for t in timeline]


@dataclass(frozen=True)
class Snapshot:
    """Reference instant for account-age features (UTC epoch seconds)."""

    as_of: int


def _dist_cols(base: str) -> list[str]:
    return [f"{base}_{p}" for p in PARAM_NAMES]


CREDIBILITY_COLUMNS = [
    "following_count", "followers_count", "followers_ratio",
    "account_age_days", "followers_age_ratio", "following_age_ratio",
    "tweets_age_ratio", "verified", "has_bio", "has_default_pic",
    "has_url_in_bio", "urls_count_bio", "hashtags_count_bio",
    "listed_count", "bio_sentences", "bio_tokens", "bio_chars",
]

INITIATIVE_RATIO_COLUMNS = [
    "retweet_ratio", "reply_ratio", "tweet_url_ratio",
    "retweet_url_ratio", "reply_url_ratio",
]
INITIATIVE_COLUMNS = (INITIATIVE_RATIO_COLUMNS
                      + _dist_cols("unique_words") + _dist_cols("pair_entropy"))

ADAPTABILITY_BLOCKS = [
    "language_novelty", "time_between_tweets", "time_between_retweets",
    "time_between_mentions", "retweeted_accounts", "url_domains",
    "tweet_words", "tweet_chars",
]
ADAPTABILITY_COLUMNS = [c for b in ADAPTABILITY_BLOCKS for c in _dist_cols(b)]

FEATURE_COLUMNS = CREDIBILITY_COLUMNS + INITIATIVE_COLUMNS + ADAPTABILITY_COLUMNS
assert len(FEATURE_COLUMNS) == 92

TRAIT_GROUPS = {
    "credibility": list(CREDIBILITY_COLUMNS),
    "initiative": list(INITIATIVE_COLUMNS),
    "adaptability": list(ADAPTABILITY_COLUMNS),
}


def credibility_features(user, snapshot: Snapshot) -> dict[str, float]:
    """Profile-metadata columns.

    followers_ratio divides by the squared follower count with a guard of
    1 for accounts without followers; age-ratio denominators are floored
    at one day.
    """
    if snapshot.as_of < user.created_at:
        raise FeatureError(
            f"snapshot predates creation of user {user.user_id}")
    age_days = (snapshot.as_of - user.created_at) / SECONDS_PER_DAY
    age_den = max(age_days, 1.0)
    bio = user.bio or ""
    has_bio = 1.0 if bio.strip() else 0.0
    out = {
        "following_count": float(user.following_count),
        "followers_count": float(user.followers_count),
        "followers_ratio": user.following_count / max(user.followers_count, 1) ** 2,
        "account_age_days": age_days,
        "followers_age_ratio": user.followers_count / age_den,
        "following_age_ratio": user.following_count / age_den,
        "tweets_age_ratio": user.tweet_count / age_den,
        "verified": 1.0 if user.verified else 0.0,
        "has_bio": has_bio,
        "has_default_pic": 1.0 if user.has_default_pic else 0.0,
        "listed_count": float(user.listed_count),
    }
    if has_bio:
        out["has_url_in_bio"] = 1.0 if _URL_RE.search(bio) else 0.0
        out["urls_count_bio"] = float(len(_URL_RE.findall(bio)))
        out["hashtags_count_bio"] = float(len(_HASHTAG_RE.findall(bio)))
        out["bio_sentences"] = float(sum(
            1 for s in _SENTENCE_SPLIT_RE.split(bio) if s.strip()))
        out["bio_tokens"] = float(len(tokenize(bio)))
        out["bio_chars"] = float(len(bio))
    else:
        for col in ("has_url_in_bio", "urls_count_bio", "hashtags_count_bio",
                    "bio_sentences", "bio_tokens", "bio_chars"):
            out[col] = 0.0
    return out


def _dist_values(base: str, sample: list[float]) -> dict[str, float]:
    if not sample:
        return {c: math.nan for c in _dist_cols(base)}
    params = dist_params(sample)
    return dict(zip(_dist_cols(base), params.as_tuple()))


def pair_token_entropy(a: TokenizedTweet, b: TokenizedTweet) -> float | None:
    """Entropy (bits) of the token-frequency distribution of two posts
    taken together; None when the pair carries no tokens."""
    counts = Counter(a.tokens)
    counts.update(b.tokens)
    if not counts:
        return None
    return entropy_from_counts(counts.values())


def initiative_features(timeline: list[TokenizedTweet]) -> dict[str, float]:
    """Activity-mix ratios and the two initiative distributions.

    Every ratio shares the same denominator: the total number of timeline
    items, so the four kind shares partition to exactly 1.
    """
    if not timeline:
        return {c: math.nan for c in INITIATIVE_COLUMNS}
    n = len(timeline)
    out = {
        "retweet_ratio": sum(t.is_retweet for t in timeline) / n,
        "reply_ratio": sum(t.is_reply for t in timeline) / n,
        "tweet_url_ratio": sum(t.has_url for t in timeline) / n,
        "retweet_url_ratio": sum(t.is_retweet and t.has_url for t in timeline) / n,
        "reply_url_ratio": sum(t.is_reply and t.has_url for t in timeline) / n,
    }
    unique_words = [float(len(set(t.tokens))) for t in timeline]
    out.update(_dist_values("unique_words", unique_words))
    pair_entropies = []
    for a, b in zip(timeline, timeline[1:]):
        h = pair_token_entropy(a, b)
        if h is not None:
            pair_entropies.append(h)
    out.update(_dist_values("pair_entropy", pair_entropies))
    return out


def language_novelty_series(timeline: list[TokenizedTweet]) -> list[float]:
    """Per-post percentage of token types unseen in all earlier posts.

    The first post carrying tokens scores 100; token-free posts are
    skipped (they introduce no types).
    """
    seen: set[str] = set()
    series = []
    for tweet in timeline:
        types = set(tweet.tokens)
        if not types:
            continue
        series.append(100.0 * len(types - seen) / len(types))
        seen |= types
    return series


def _gaps(timestamps: list[int]) -> list[float]:
    return [float(b - a) for a, b in zip(timestamps, timestamps[1:])]


def adaptability_features(timeline: list[TokenizedTweet]) -> dict[str, float]:
    """Temporal and lexical adaptability distributions.

    The timeline must be chronological; sub-streams too small to form a
    sample yield NaN for their seven parameters.
    """
    out: dict[str, float] = {}
    out.update(_dist_values("language_novelty",
                            language_novelty_series(timeline)))
    out.update(_dist_values("time_between_tweets",
                            _gaps([t.timestamp for t in timeline])))
    out.update(_dist_values("time_between_retweets",
                            _gaps([t.timestamp for t in timeline
                                   if t.is_retweet])))
    out.update(_dist_values("time_between_mentions",
                            _gaps([t.timestamp for t in timeline
                                   if t.has_mention])))
    rt_counts = Counter(t.retweeted_author for t in timeline
                        if t.is_retweet and t.retweeted_author)
    out.update(_dist_values("retweeted_accounts",
                            [float(c) for _, c in sorted(rt_counts.items())]))
    domain_counts: Counter[str] = Counter()
    for tweet in timeline:
        for url in tweet.urls:
            domain = registered_domain(url)
            if domain:
                domain_counts[domain] += 1
    out.update(_dist_values("url_domains",
                            [float(c) for _, c in sorted(domain_counts.items())]))
    out.update(_dist_values("tweet_words",
                            [float(len(t.tokens)) for t in timeline]))
    out.update(_dist_values("tweet_chars",
                            [float(t.n_chars) for t in timeline]))
    return out


def user_features(corpus: Corpus, user_id: str,
                  snapshot: Snapshot) -> dict[str, float]:
    """All 92 behavioral columns for one user."""
    user = corpus.users[user_id]
    timeline = tokenize_timeline(corpus.timeline(user_id))
    feats = credibility_features(user, snapshot)
    feats.update(initiative_features(timeline))
    feats.update(adaptability_features(timeline))
    return feats


@dataclass
class FeatureMatrix:
    """Labeled rows of named numeric columns; NaN marks a missing cell."""

    columns: list[str]
    user_ids: list[str]
    labels: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.user_ids), len(self.columns)):
            raise FeatureError("matrix shape does not match row/column names")
        if len(self.labels) != len(self.user_ids):
            raise FeatureError("label count does not match row count")

    @property
    def n_rows(self) -> int:
        return len(self.user_ids)

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise FeatureError(f"unknown column {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.column_index(name)]

    def select_columns(self, names) -> "FeatureMatrix":
        idx = [self.column_index(n) for n in names]
        return FeatureMatrix(columns=list(names), user_ids=list(self.user_ids),
                             labels=self.labels.copy(),
                             values=self.values[:, idx].copy())

    def select_rows(self, idx) -> "FeatureMatrix":
        idx = np.asarray(idx)
        return FeatureMatrix(columns=list(self.columns),
                             user_ids=[self.user_ids[i] for i in idx],
                             labels=self.labels[idx].copy(),
                             values=self.values[idx].copy())

    def append_columns(self, names: list[str],
                       values: np.ndarray) -> "FeatureMatrix":
        dup = set(names) & set(self.columns)
        if dup:
            raise FeatureError(f"duplicate column name: {sorted(dup)[0]}")
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (self.n_rows, len(names)):
            raise FeatureError("appended block shape mismatch")
        return FeatureMatrix(columns=self.columns + list(names),
                             user_ids=list(self.user_ids),
                             labels=self.labels.copy(),
                             values=np.hstack([self.values, values]))

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.columns + ["user_id", "label"])
            for i in range(self.n_rows):
                row = [("" if math.isnan(v) else repr(float(v)))
                       for v in self.values[i]]
                writer.writerow(row + [self.user_ids[i], int(self.labels[i])])

    @classmethod
    def from_csv(cls, path) -> "FeatureMatrix":
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[-2:] != ["user_id", "label"]:
                raise FeatureError("feature CSV must end with user_id,label")
            columns = header[:-2]
            user_ids, labels, rows = [], [], []
            for row in reader:
                rows.append([float(v) if v else math.nan
                             for v in row[:-2]])
                user_ids.append(row[-2])
                labels.append(int(row[-1]))
        return cls(columns=columns, user_ids=user_ids,
                   labels=np.array(labels, dtype=np.int64),
                   values=np.array(rows, dtype=np.float64).reshape(
                       len(user_ids), len(columns)))


_worker_ctx: dict = {}


def _init_worker(corpus: Corpus, snapshot: Snapshot) -> None:
    _worker_ctx["corpus"] = corpus
    _worker_ctx["snapshot"] = snapshot


def _extract_one(user_id: str) -> list[float]:
    feats = user_features(_worker_ctx["corpus"], user_id,
                          _worker_ctx["snapshot"])
    return [feats[c] for c in FEATURE_COLUMNS]


def feature_matrix(corpus: Corpus, conspiracy: set[str], control: set[str],
                   snapshot: Snapshot, workers: int = 1) -> FeatureMatrix:
    """One labeled row per cohort user (engaged=1 first, control=0 after).

    Extraction is per-user independent; the result is identical for every
    worker count. Users without a profile record are skipped with a
    warning.
    """
    overlap = conspiracy & control
    if overlap:
        raise FeatureError(f"cohorts overlap: {sorted(overlap)[:3]}")
    ordered: list[tuple[str, int]] = []
    for user_id in sorted(conspiracy):
        ordered.append((user_id, 1))
    for user_id in sorted(control):
        ordered.append((user_id, 0))
    kept = []
    for user_id, label in ordered:
        if user_id not in corpus.users:
            logger.warning("skipping user %s: no profile record", user_id)
            continue
        kept.append((user_id, label))
    ids = [u for u, _ in kept]
    if workers > 1 and len(ids) > 1:
        with ProcessPoolExecutor(max_workers=workers,
                                 initializer=_init_worker,
                                 initargs=(corpus, snapshot)) as pool:
            chunk = max(1, len(ids) // (workers * 4))
            rows = list(pool.map(_extract_one, ids, chunksize=chunk))
    else:
        _init_worker(corpus, snapshot)
        rows = [_extract_one(u) for u in ids]
    values = (np.array(rows, dtype=np.float64)
              if rows else np.empty((0, len(FEATURE_COLUMNS))))
    return FeatureMatrix(columns=list(FEATURE_COLUMNS), user_ids=ids,
                         labels=np.array([l for _, l in kept], dtype=np.int64),
                         values=values)


def default_snapshot(corpus: Corpus) -> Snapshot:
    """Latest profile snapshot instant in the corpus."""
    if not corpus.users:
        raise FeatureError("corpus has no users")
    return Snapshot(as_of=max(u.snapshot_at for u in corpus.users.values()))
