# Computational Engines
