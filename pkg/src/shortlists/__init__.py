from .bits import BitLabel, UniverseSpec
