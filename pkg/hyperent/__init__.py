# Hyperentangled-photon protocol simulator
__version__ = "1.0.0"
