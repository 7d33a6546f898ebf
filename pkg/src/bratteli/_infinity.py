"""Positive-infinity sentinel used for cylinder measures and reciprocal multiplicities."""


class Infinity:
    """Absorbing positive infinity. A single instance ``INF`` is exported.

    Only the operations the measure layer needs are defined: addition with
    anything, multiplication by positive values, and order comparisons.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __mul__(self, other):
        return self

    __rmul__ = __mul__

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("bratteli-infinity")

    def __repr__(self):
        return "inf"


INF = Infinity()


def is_infinite(value):
    return value is INF
