"""Identity of deductions in free cartesian and symmetric-associative
categories: coherence oracles, bounded congruence closure and an equational
proof-script checker."""

__version__ = "0.1.0"
