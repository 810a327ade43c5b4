import pytest
from hypothesis import given, strategies as st

from mango_nav.errors import InvalidUrl
from mango_nav.urls import canonicalize_url, registrable_domain

from rfc3986_ref import resolve

# (reference, resolved) pairs against base http://a/b/c/d;p?q, built from the
# RFC 3986 section 5.4 worked examples before canonicalize_url was written.
RFC_BASE = "http://a/b/c/d;p?q"
RFC_CASES = [
    ("g", "http://a/b/c/g"),
    ("./g", "http://a/b/c/g"),
    ("g/", "http://a/b/c/g/"),
    ("/g", "http://a/g"),
    ("//g", "http://g"),
    ("?y", "http://a/b/c/d;p?y"),
    ("g?y", "http://a/b/c/g?y"),
    ("#s", "http://a/b/c/d;p?q#s"),
    ("g#s", "http://a/b/c/g#s"),
    ("g?y#s", "http://a/b/c/g?y#s"),
    (";x", "http://a/b/c/;x"),
    ("g;x", "http://a/b/c/g;x"),
    ("g;x?y#s", "http://a/b/c/g;x?y#s"),
    ("", "http://a/b/c/d;p?q"),
    (".", "http://a/b/c/"),
    ("./", "http://a/b/c/"),
    ("..", "http://a/b/"),
    ("../", "http://a/b/"),
    ("../g", "http://a/b/g"),
    ("../..", "http://a/"),
    ("../../", "http://a/"),
    ("../../g", "http://a/g"),
    ("../../../g", "http://a/g"),
    ("../../../../g", "http://a/g"),
    ("/./g", "http://a/g"),
    ("/../g", "http://a/g"),
    ("g.", "http://a/b/c/g."),
    (".g", "http://a/b/c/.g"),
    ("g..", "http://a/b/c/g.."),
    ("..g", "http://a/b/c/..g"),
    ("./../g", "http://a/b/g"),
    ("./g/.", "http://a/b/c/g/"),
    ("g/./h", "http://a/b/c/g/h"),
    ("g/../h", "http://a/b/c/h"),
    ("g;x=1/./y", "http://a/b/c/g;x=1/y"),
    ("g;x=1/../y", "http://a/b/c/y"),
]


def test_oracle_matches_frozen_table():
    # sanity-check the oracle itself against the hand-built expectations
    for ref, expected in RFC_CASES:
        assert resolve(RFC_BASE, ref) == expected, ref


@pytest.mark.parametrize("ref,expected", [c for c in RFC_CASES if c[0]])
def test_canonicalize_agrees_with_rfc_oracle(ref, expected):
    # canonical form of the implementation's resolution must equal the
    # canonical form of the oracle's resolution
    assert canonicalize_url(ref, RFC_BASE) == canonicalize_url(expected)


def test_fragment_removed():
    assert canonicalize_url("#top", "https://a.com/x") == "https://a.com/x"


def test_scheme_host_lowered_default_port_dropped():
    assert canonicalize_url("HTTPS://A.com:443/p") == "https://a.com/p"


def test_relative_with_query():
    assert canonicalize_url("../y?q=1", "https://a.com/x/z") == "https://a.com/y?q=1"


def test_non_default_port_kept():
    assert canonicalize_url("http://a.com:8080/x") == "http://a.com:8080/x"


def test_bare_host_trailing_slash_collapses():
    assert canonicalize_url("https://a.com/") == "https://a.com"
    assert canonicalize_url("https://a.com") == "https://a.com"
    # non-empty paths keep their trailing slash
    assert canonicalize_url("https://a.com/x/") == "https://a.com/x/"


def test_query_preserved_verbatim():
    assert canonicalize_url("https://a.com/p?b=2&a=1") == "https://a.com/p?b=2&a=1"


@pytest.mark.parametrize("bad", ["", "   ", "ftp://a.com/x", "mailto:x@y.z", "https://"])
def test_invalid_urls_rejected(bad):
    with pytest.raises(InvalidUrl):
        canonicalize_url(bad)


def test_relative_without_base_rejected():
    with pytest.raises(InvalidUrl):
        canonicalize_url("/just/a/path")


_url_paths = st.lists(
    st.text(alphabet="abcxyz019.-_", min_size=1, max_size=6), min_size=0, max_size=4
)


@given(
    scheme=st.sampled_from(["http", "https", "HTTP", "Https"]),
    host=st.sampled_from(["a.com", "A.COM", "sub.a.co.uk", "x-y.org"]),
    port=st.sampled_from(["", ":80", ":443", ":8080"]),
    path=_url_paths,
    query=st.sampled_from(["", "?q=1", "?a=b&c=d"]),
    fragment=st.sampled_from(["", "#top", "#a/b"]),
    trailing=st.booleans(),
)
def test_canonicalize_idempotent(scheme, host, port, path, query, fragment, trailing):
    raw = f"{scheme}://{host}{port}/" + "/".join(path)
    if trailing:
        raw += "/"
    raw += query + fragment
    once = canonicalize_url(raw)
    assert canonicalize_url(once) == once


def test_registrable_domain():
    assert registrable_domain("https://docs.a.com/x") == "a.com"
    assert registrable_domain("a.com") == "a.com"
    assert registrable_domain("deep.sub.a.com") == "a.com"
    assert registrable_domain("www.example.co.uk") == "example.co.uk"
    assert registrable_domain("user.github.io") == "user.github.io"
    assert registrable_domain("192.168.0.1") == "192.168.0.1"
    assert registrable_domain("localhost") == "localhost"
