"""
Forge client: fetch a fork network from a GitHub-style REST API into a dataset
directory, and verify what was fetched.
"""
from forkentropy.forge.client import ForgeClient
from forkentropy.forge.fetcher import RESOURCES, FetchPlan, FetchReport, fetch
from forkentropy.forge.verify import CURSOR_AHEAD, VerifyReport, verify_cache

__all__ = [
    "CURSOR_AHEAD",
    "FetchPlan",
    "FetchReport",
    "ForgeClient",
    "RESOURCES",
    "VerifyReport",
    "fetch",
    "verify_cache",
]
