"""Bond percolation on high-dimensional Cartesian product graphs."""
