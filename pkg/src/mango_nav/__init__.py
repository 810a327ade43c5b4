"""Budget-constrained web navigation with a global site view.

Pipeline: BFS-crawl the site and rank pages with BM25, augment with
site-restricted search, seed a finite-lifetime Beta-Bernoulli Thompson
sampler from the normalized relevance scores, then allocate the navigation
budget across candidate start URLs — reflecting on every attempt, feeding
rewards back, and remembering episodes for revisits. Agents, browser
environments, search, and keyword generation are injected adapters; the
whole engine runs offline against scripted fixtures.
"""

from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
