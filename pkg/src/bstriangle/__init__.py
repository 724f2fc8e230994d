"""Computations with triangles of Baumslag-Solitar groups.

``G(a,b;c,d;e,f) = <x,y,z | (x^a)^y = x^b, (y^c)^z = y^d, (z^e)^x = z^f>``
"""

from .triangle import TriangleParams, presentation
from .decide import analyze_Q, decide, finiteness_verdict

__all__ = ["TriangleParams", "presentation", "decide", "analyze_Q", "finiteness_verdict"]
__version__ = "0.1.0"
