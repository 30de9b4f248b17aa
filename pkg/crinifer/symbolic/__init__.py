"""Symbolic dynamics: fundamental domains, addresses and orders"""
from .addresses import (
    DELTA,
    ExternalAddress,
    SignedAddress,
    Symbol,
    SymbolOrder,
    cyclic_order_at_infinity,
    default_order,
    lex_compare,
    parse_address,
    parse_symbol,
    periodic_addresses,
    shift_closure,
)
from .tracts import (
    Alphabet,
    DomainSpec,
    FundamentalDomain,
    address_of_orbit,
    build_alphabet,
    classify_point,
    default_domain_spec,
    validate_domain_spec,
)

__all__ = [
    "DELTA",
    "Alphabet",
    "DomainSpec",
    "ExternalAddress",
    "FundamentalDomain",
    "SignedAddress",
    "Symbol",
    "SymbolOrder",
    "address_of_orbit",
    "build_alphabet",
    "classify_point",
    "cyclic_order_at_infinity",
    "default_domain_spec",
    "default_order",
    "lex_compare",
    "parse_address",
    "parse_symbol",
    "periodic_addresses",
    "shift_closure",
    "validate_domain_spec",
]
