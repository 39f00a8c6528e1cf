"""
Text patterns that tie commits and comments back to pull requests.
"""
import bisect
import re
from typing import Iterable, Iterator, Optional, Sequence, Set

CLOSING_PHRASE = re.compile(r"\b(clos(e|es|ed)|fix(es|ed)?|resolv(e|es|ed))\b[\s:]*#([0-9]+)", re.IGNORECASE)
MERGE_INDICATION = re.compile(r"(merg|apply|appl|pull|push|integrat|land|cherry(-|\s+)pick|squash)(ing|i?ed)", re.IGNORECASE)
SHA_REFERENCE = re.compile(r"\b[0-9a-f]{7,40}\b", re.IGNORECASE)

COMMENTS_CONSIDERED = 3


def closed_references(messages: Iterable[str]) -> Set[int]:
    """Pull request numbers closed by any of the commit messages."""
    numbers: Set[int] = set()
    for message in messages:
        for match in CLOSING_PHRASE.finditer(message):
            numbers.add(int(match.group(5)))
    return numbers


def resolve_prefix(sorted_history: Sequence[str], ref: str) -> Optional[str]:
    """Full sha in ``sorted_history`` that ``ref`` is a prefix of, or None."""
    ref = ref.lower()
    position = bisect.bisect_left(sorted_history, ref)
    if position < len(sorted_history) and sorted_history[position].startswith(ref):
        return sorted_history[position]
    return None


def merge_comment_shas(comments: Sequence[str], sorted_history: Sequence[str]) -> Iterator[str]:
    """
    History shas cited by the last few comments that announce an integration.

    Only the final ``COMMENTS_CONSIDERED`` comments are read.
    """
    for comment in comments[-COMMENTS_CONSIDERED:]:
        if not MERGE_INDICATION.search(comment):
            continue
        for match in SHA_REFERENCE.finditer(comment):
            sha = resolve_prefix(sorted_history, match.group(0))
            if sha is not None:
                yield sha
