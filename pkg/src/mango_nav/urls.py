"""URL canonicalization and registrable-domain extraction.

Canonical form: lowercase http(s) scheme and host, no fragment, no default
port, query preserved, and a bare host gets no trailing slash (path "/"
collapses to ""). Canonicalization is idempotent.
"""

from __future__ import annotations

from urllib.parse import urljoin, urlsplit, urlunsplit

from .errors import InvalidUrl

_DEFAULT_PORTS = {"http": "80", "https": "443"}

# Common two-level public suffixes; enough for registrable-domain grouping
# on ordinary sites. A live deployment can swap in the full PSL.
_TWO_LEVEL_SUFFIXES = {
    "co.uk", "org.uk", "ac.uk", "gov.uk", "me.uk", "net.uk",
    "com.au", "net.au", "org.au", "edu.au", "gov.au",
    "co.jp", "ne.jp", "or.jp", "ac.jp", "go.jp",
    "com.br", "net.br", "org.br", "gov.br",
    "co.nz", "net.nz", "org.nz",
    "co.in", "net.in", "org.in", "ac.in", "gov.in",
    "com.cn", "net.cn", "org.cn", "gov.cn",
    "co.kr", "or.kr", "ac.kr",
    "com.mx", "org.mx", "com.ar", "com.tr", "com.sg", "com.hk",
    "co.za", "org.za", "github.io", "gitlab.io", "blogspot.com",
}


def canonicalize_url(raw: str, base: str | None = None) -> str:
    """Resolve `raw` against `base` (RFC 3986) and normalize the result.

    Raises InvalidUrl if the resolved URL is not absolute http(s) with a
    host.
    """
    if not raw or not raw.strip():
        raise InvalidUrl("empty URL")
    raw = raw.strip()
    resolved = urljoin(base, raw) if base else raw
    parts = urlsplit(resolved)
    scheme = parts.scheme.lower()
    if scheme not in ("http", "https"):
        raise InvalidUrl(f"unsupported scheme in {resolved!r}")
    host = parts.hostname
    if not host:
        raise InvalidUrl(f"no host in {resolved!r}")
    host = host.lower()
    netloc = host
    try:
        port = parts.port
    except ValueError as exc:
        raise InvalidUrl(f"bad port in {resolved!r}") from exc
    if port is not None and str(port) != _DEFAULT_PORTS[scheme]:
        netloc = f"{host}:{port}"
    if parts.username:
        auth = parts.username
        if parts.password:
            auth += f":{parts.password}"
        netloc = f"{auth}@{netloc}"
    path = parts.path
    if path == "/":
        path = ""
    return urlunsplit((scheme, netloc, path, parts.query, ""))


def registrable_domain(url_or_host: str) -> str:
    """Public-suffix-aware registrable domain ("docs.a.co.uk" -> "a.co.uk").

    Accepts either a canonical URL or a bare host. IP literals and
    single-label hosts are returned unchanged.
    """
    host = url_or_host
    if "//" in host:
        host = urlsplit(host).hostname or ""
    host = host.lower().rstrip(".")
    labels = host.split(".")
    if len(labels) < 2 or all(part.isdigit() for part in labels):
        return host
    if len(labels) >= 3 and ".".join(labels[-2:]) in _TWO_LEVEL_SUFFIXES:
        return ".".join(labels[-3:])
    return ".".join(labels[-2:])


def same_registrable_domain(url: str, root_domain: str) -> bool:
    return registrable_domain(url) == root_domain
