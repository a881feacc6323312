"""cyclegraph - inverse Sturm-Liouville problems on a graph with one cycle"""

__version__ = "0.1.0"
