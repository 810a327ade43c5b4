"""Independent RFC 3986 reference resolver used only as a test oracle.

Literal transcription of the section 5.2 algorithm (component recomposition,
merge, remove_dot_segments) over the appendix-B regex. Deliberately does not
import anything from mango_nav so the oracle stays independent of the code
under test.
"""

import re

_URI_RE = re.compile(
    r"^(?:([^:/?#]+):)?(?://([^/?#]*))?([^?#]*)(?:\?([^#]*))?(?:#(.*))?$"
)


def split_uri(uri):
    m = _URI_RE.match(uri)
    scheme, authority, path, query, fragment = m.groups()
    return scheme, authority, path or "", query, fragment


def remove_dot_segments(path):
    output = []
    while path:
        if path.startswith("../"):
            path = path[3:]
        elif path.startswith("./"):
            path = path[2:]
        elif path.startswith("/./"):
            path = "/" + path[3:]
        elif path == "/.":
            path = "/"
        elif path.startswith("/../"):
            path = "/" + path[4:]
            if output:
                output.pop()
        elif path == "/..":
            path = "/"
            if output:
                output.pop()
        elif path in (".", ".."):
            path = ""
        else:
            cut = path.find("/", 1)
            if cut == -1:
                output.append(path)
                path = ""
            else:
                output.append(path[:cut])
                path = path[cut:]
    return "".join(output)


def merge(base_authority, base_path, ref_path):
    if base_authority is not None and base_path == "":
        return "/" + ref_path
    cut = base_path.rfind("/")
    if cut == -1:
        return ref_path
    return base_path[: cut + 1] + ref_path


def resolve(base, ref):
    b_scheme, b_auth, b_path, b_query, _ = split_uri(base)
    r_scheme, r_auth, r_path, r_query, r_frag = split_uri(ref)

    if r_scheme is not None:
        scheme, authority = r_scheme, r_auth
        path = remove_dot_segments(r_path)
        query = r_query
    else:
        scheme = b_scheme
        if r_auth is not None:
            authority = r_auth
            path = remove_dot_segments(r_path)
            query = r_query
        else:
            authority = b_auth
            if r_path == "":
                path = b_path
                query = r_query if r_query is not None else b_query
            else:
                if r_path.startswith("/"):
                    path = remove_dot_segments(r_path)
                else:
                    path = remove_dot_segments(merge(b_auth, b_path, r_path))
                query = r_query

    out = ""
    if scheme is not None:
        out += scheme + ":"
    if authority is not None:
        out += "//" + authority
    out += path
    if query is not None:
        out += "?" + query
    if r_frag is not None:
        out += "#" + r_frag
    return out
