"""
Forge REST transport: authenticated GETs, Link-header pagination and
rate-limit / auth error mapping over a ``requests.Session``.
"""
import threading
import time
from typing import Any, Dict, Iterator, List, Optional, Tuple

import requests

from forkentropy import __version__
from forkentropy.errors import AuthFailure, FetchError, PartialFetch, RateLimited, UpstreamSchemaChange
from forkentropy.logging_config import get_logger

logger = get_logger(__name__)

DEFAULT_PER_PAGE = 100


class BudgetExhausted(PartialFetch):
    """The max-requests budget ran out before the fetch completed."""

    def __init__(self, url: str, budget: int):
        super().__init__(resource=url, cursor=url, reason=f"max-requests budget of {budget} exhausted")


class ForgeClient:
    """Thin GitHub-style REST client."""

    def __init__(
        self,
        api_base_url: str,
        token: Optional[str] = None,
        timeout: float = 30.0,
        max_requests: Optional[int] = None,
        session: Optional[requests.Session] = None,
    ):
        """
        Args:
            api_base_url: Base URL of the API, e.g. https://api.github.com
            token: Optional bearer token; anonymous when None
            timeout: Per-request timeout in seconds
            max_requests: Optional cap on the number of requests
            session: Optional session (tests inject a replaying session)
        """
        self.api_base_url = api_base_url.rstrip("/")
        self.timeout = timeout
        self.max_requests = max_requests
        self.session = session or requests.Session()
        self.session.headers.update({
            "Accept": "application/vnd.github+json",
            "User-Agent": f"fork-entropy/{__version__}",
        })
        if token:
            self.session.headers["Authorization"] = f"Bearer {token}"
        self._lock = threading.Lock()
        self.request_count = 0

    def url(self, path: str) -> str:
        if path.startswith(("http://", "https://")):
            return path
        return f"{self.api_base_url}/{path.lstrip('/')}"

    def _count_request(self, url: str) -> None:
        with self._lock:
            if self.max_requests is not None and self.request_count >= self.max_requests:
                raise BudgetExhausted(url, self.max_requests)
            self.request_count += 1

    @staticmethod
    def retry_after(response: requests.Response) -> float:
        """Seconds to wait, from Retry-After or the rate-limit reset time."""
        header = response.headers.get("Retry-After")
        if header is not None:
            try:
                return max(0.0, float(header))
            except ValueError:
                pass
        reset = response.headers.get("X-RateLimit-Reset")
        if reset is not None:
            try:
                return max(0.0, float(reset) - time.time())
            except ValueError:
                pass
        return 60.0

    def check(self, response: requests.Response) -> requests.Response:
        """
        Map error statuses onto the fetch error taxonomy.

        Raises:
            AuthFailure: On 401, or 403 that is not a rate limit
            RateLimited: On 429, or 403 with an exhausted quota
            FetchError: On any other non-success status
        """
        status = response.status_code
        if status < 400:
            return response
        url = response.url
        if status == 401:
            raise AuthFailure("Forge rejected the credentials (401)", url=url)
        if status in (403, 429):
            exhausted = response.headers.get("X-RateLimit-Remaining") == "0"
            if status == 429 or exhausted or "Retry-After" in response.headers:
                wait = self.retry_after(response)
                logger.warning(f"Rate limited on {url}; retry after {wait:.0f}s")
                raise RateLimited(wait, url)
            raise AuthFailure(f"Access forbidden (403): {url}", url=url)
        raise FetchError(f"Forge request failed with status {status}: {url}", status=status, url=url)

    def get(self, path: str, params: Optional[Dict[str, Any]] = None,
            headers: Optional[Dict[str, str]] = None) -> requests.Response:
        url = self.url(path)
        self._count_request(url)
        logger.debug(f"GET {url} params={params}")
        try:
            response = self.session.get(url, params=params, headers=headers, timeout=self.timeout)
        except requests.RequestException as e:
            logger.error(f"Network error on {url}: {e}")
            raise FetchError(f"Network error: {e}", url=url)
        return self.check(response)

    def get_json(self, path: str, params: Optional[Dict[str, Any]] = None,
                 headers: Optional[Dict[str, str]] = None) -> Any:
        response = self.get(path, params, headers)
        try:
            return response.json()
        except ValueError:
            raise UpstreamSchemaChange("<body>", response.url)

    def pages(
        self,
        path: str,
        params: Optional[Dict[str, Any]] = None,
        headers: Optional[Dict[str, str]] = None,
    ) -> Iterator[Tuple[str, List[Any], Optional[str]]]:
        """
        Iterate over a paginated list endpoint.

        ``path`` may be a full page URL taken from a saved cursor, in which
        case ``params`` are already part of it.

        Yields:
            (page url, items, next page url or None)
        """
        url: Optional[str] = self.url(path)
        query = dict(params or {})
        query.setdefault("per_page", DEFAULT_PER_PAGE)
        first = True
        while url:
            response = self.get(url, query if first and "?" not in url else None, headers)
            first = False
            try:
                items = response.json()
            except ValueError:
                raise UpstreamSchemaChange("<body>", response.url)
            if not isinstance(items, list):
                raise UpstreamSchemaChange("<list>", response.url)
            next_url = response.links.get("next", {}).get("url")
            yield response.url, items, next_url
            url = next_url
