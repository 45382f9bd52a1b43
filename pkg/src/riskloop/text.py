"""Shared tokenizer used by blocking, similarity features and the risk engine."""

import re

_TOKEN_RE = re.compile(r"[0-9a-z]+")


def tokenize(text):
    """Lowercase, split on non-alphanumeric runs, drop empty tokens."""
    if not text:
        return []
    return _TOKEN_RE.findall(text.lower())


def token_set(text):
    return set(tokenize(text))
