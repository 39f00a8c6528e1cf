"""
Bug-report classification of issues by stemmed keyword match.
"""
from functools import lru_cache
from typing import FrozenSet, Iterable, Set

from nltk.stem import PorterStemmer
from nltk.tokenize import RegexpTokenizer

from forkentropy.dataset.records import EventDataset, IssueRecord

BUG_KEYWORDS = ("defect", "error", "bug", "issue", "mistake", "incorrect", "fault", "flaw")

_stemmer = PorterStemmer()
_tokenizer = RegexpTokenizer(r"[A-Za-z0-9]+")


@lru_cache(maxsize=4096)
def stem(token: str) -> str:
    return _stemmer.stem(token.lower())


STEMMED_KEYWORDS: FrozenSet[str] = frozenset(stem(k) for k in BUG_KEYWORDS)


def stemmed_tokens(text: str) -> Set[str]:
    """Lowercased Porter stems of the alphanumeric runs of ``text``."""
    return {stem(token) for token in _tokenizer.tokenize(text)}


def is_bug_report(issue: IssueRecord) -> bool:
    """True iff a stemmed token of the title or of any label is a stemmed bug keyword."""
    texts: Iterable[str] = (issue.title, *issue.labels)
    return any(not STEMMED_KEYWORDS.isdisjoint(stemmed_tokens(text)) for text in texts)


def count_bug_reports(snapshot, dataset: EventDataset) -> int:
    """Bug-report issues created inside the snapshot interval, whoever reported them."""
    return sum(1 for issue in dataset.issues if snapshot.contains(issue.created_at) and is_bug_report(issue))
