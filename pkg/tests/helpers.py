from __future__ import annotations

from paracontact.checks import CheckConfig, compare
from paracontact.symexpr import DomainBox

CFG = CheckConfig()


def same(a, b, coords, domain=None, cfg=CFG) -> bool:
    return compare(a, b, coords, domain or DomainBox(), cfg).passed
