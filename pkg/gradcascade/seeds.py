# -*- coding: utf-8 -*-
"""Seed derivation shared by training and synthetic campaigns"""

import hashlib


def derive_seed(master_seed, *parts):
    """
    Stable 63-bit seed for a stream identified by ``parts`` (scale, seed index, purpose tag...).

    Args:
        master_seed (int): Campaign master seed.
        *parts: Identifying values, rendered with ``str``.

    Returns:
        int
    """
    text = ':'.join(str(part) for part in (master_seed,) + parts)
    return int.from_bytes(hashlib.sha256(text.encode('utf-8')).digest()[:8], 'big') >> 1
