"""Numerical toolkit for sigma_k Schouten-curvature problems on radial model geometries."""
