"""Word maps, word gradings, Nica limit laws and random graph lifts."""

__version__ = "0.1.0"
