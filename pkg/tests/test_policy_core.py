# -*- coding: utf-8 -*-
import random

import numpy as np
import pytest

from conftest import EXFIL_DPU, FFT_APU, SEMAPHORE_DPU
from pyisea.exceptions import CapacityError, PolicyError
from pyisea.policy.core import AccessKind, ApuPolicy, ApuVerdict, \
    DpuPolicy, DpuVerdict, MatchMode, Permission, PolicyRegisterSpace, \
    apu_check, apu_check_array, apu_range, dpu_check, dpu_check_array, \
    dpu_range, dpu_scope_match, is_stray, scope_bounds, scope_match, \
    scope_match_array

READ, WRITE = AccessKind.READ, AccessKind.WRITE
MASKED, RANGE = MatchMode.MASKED_EQUALITY, MatchMode.RANGE_INTERVAL


def test_apu_range_of_fft_policies():
    assert apu_range(FFT_APU[0]) == (0x40020000, 0x4002006C)
    assert apu_range(FFT_APU[1]) == (0x40020074, 0x40020FFF)


def test_apu_range_with_zero_mask_is_single_address():
    policy = ApuPolicy(0x1, 0x20001000, 0x0, Permission.READ_ONLY)
    assert apu_range(policy) == (0x20001000, 0x20001000)


def test_dpu_range_of_exfiltration_scope():
    assert dpu_range(EXFIL_DPU) == (0x20000000, 0x2FFFFFFF)


def test_gap_between_fft_ranges_is_denied(mode):
    prs = PolicyRegisterSpace(FFT_APU)
    assert apu_check(prs, 0x2, 0x40020070, WRITE, mode) is ApuVerdict.DENY


def test_low_word_allowed_in_both_modes(mode):
    prs = PolicyRegisterSpace(FFT_APU)
    assert apu_check(prs, 0x2, 0x40020004, WRITE, mode) is ApuVerdict.ALLOW


def test_modes_diverge_on_non_contiguous_mask():
    prs = PolicyRegisterSpace(FFT_APU)
    # 0x4002_0010 lies in the first interval but has bit 4 set, which is
    # outside the mask 0x6C.
    assert apu_check(prs, 0x2, 0x40020010, READ, RANGE) is ApuVerdict.ALLOW
    assert apu_check(prs, 0x2, 0x40020010, READ, MASKED) is ApuVerdict.DENY


def test_empty_prs_denies_everything(mode):
    prs = PolicyRegisterSpace()
    for addr in (0x0, 0x20000000, 0xFFFFFFFC):
        for kind in AccessKind:
            assert apu_check(prs, 0x1, addr, kind, mode) is ApuVerdict.DENY


def test_read_only_policy_blocks_writes(mode):
    prs = PolicyRegisterSpace([ApuPolicy(0x1, 0x20001000, 0xFF,
                                         Permission.READ_ONLY)])
    assert apu_check(prs, 0x1, 0x20001010, READ, mode) is ApuVerdict.ALLOW
    assert apu_check(prs, 0x1, 0x20001010, WRITE, mode) is ApuVerdict.DENY


def test_other_master_is_denied(mode):
    prs = PolicyRegisterSpace(FFT_APU)
    assert apu_check(prs, 0x1, 0x40020004, READ, mode) is ApuVerdict.DENY


def test_stray_only_when_no_policy_covers_address(mode):
    prs = PolicyRegisterSpace(FFT_APU)
    assert is_stray(prs, 0x40020070, mode)
    assert not is_stray(prs, 0x40020004, mode)
    assert is_stray(PolicyRegisterSpace(), 0x40020004, mode)


def test_restricted_value_is_denied(mode):
    prs = PolicyRegisterSpace(dpu_policies=[EXFIL_DPU])
    assert dpu_check(prs, 0x2, 0x2001FFE8, 0x0BADBEEF, mode) \
        is DpuVerdict.DENY


def test_other_value_is_forwarded(mode):
    prs = PolicyRegisterSpace(dpu_policies=[EXFIL_DPU])
    assert dpu_check(prs, 0x2, 0x2001FFE8, 0x12345678, mode) \
        is DpuVerdict.FORWARD


def test_dpu_ignores_other_masters(mode):
    prs = PolicyRegisterSpace(dpu_policies=[EXFIL_DPU])
    assert dpu_check(prs, 0x1, 0x2001FFE8, 0x0BADBEEF, mode) \
        is DpuVerdict.FORWARD


def test_semaphore_clearing_write_is_denied(mode):
    prs = PolicyRegisterSpace(dpu_policies=[SEMAPHORE_DPU])
    assert dpu_check(prs, 0x2, 0x5000009C, 0x00000010, mode) \
        is DpuVerdict.DENY
    assert dpu_check(prs, 0x2, 0x5000009C, 0x00000011, mode) \
        is DpuVerdict.FORWARD


def test_all_ones_dmask_denies_every_value():
    policy = DpuPolicy(0x3, 0x60000000, 0xFF, 0x0, 0xFFFFFFFF)
    prs = PolicyRegisterSpace(dpu_policies=[policy])
    rng = random.Random(7)
    for _ in range(100):
        assert dpu_check(prs, 0x3, 0x60000010, rng.getrandbits(32),
                         MASKED) is DpuVerdict.DENY


def test_dpu_scope_match_requires_master():
    assert dpu_scope_match(EXFIL_DPU, 0x2, 0x2001FFE8)
    assert not dpu_scope_match(EXFIL_DPU, 0x1, 0x2001FFE8)
    assert not dpu_scope_match(EXFIL_DPU, 0x2, 0x40000000)


def test_prs_capacity_is_enforced():
    policies = [ApuPolicy(0x1, 0x20000000 + 16 * i, 0xF,
                          Permission.READ_WRITE) for i in range(17)]
    PolicyRegisterSpace(policies[:16], apu_capacity=16)
    with pytest.raises(CapacityError) as info:
        PolicyRegisterSpace(policies, apu_capacity=16, slave=0)
    assert info.value.count == 17 and info.value.capacity == 16


@pytest.mark.parametrize("capacity", [16, 32, 64, 128])
def test_supported_capacities_fill_up(capacity):
    policies = [DpuPolicy(0x1, 0x20000000 + 16 * i, 0xF, i, 0)
                for i in range(capacity)]
    prs = PolicyRegisterSpace(dpu_policies=policies, dpu_capacity=capacity)
    assert len(prs.dpu_policies) == capacity


def test_policy_fields_must_be_32_bit():
    with pytest.raises(PolicyError):
        ApuPolicy(0x1, 1 << 32, 0, Permission.READ_ONLY)
    with pytest.raises(PolicyError):
        DpuPolicy(0x1, 0x0, 0x0, -1, 0x0)


def test_without_master_keeps_others_and_dpu():
    prs = PolicyRegisterSpace(
        FFT_APU + (ApuPolicy(0x1, 0x40020070, 0x3, Permission.READ_WRITE),),
        [EXFIL_DPU])
    stripped = prs.without_master(0x2)
    assert [p.apumid for p in stripped.apu_policies] == [0x1]
    assert stripped.dpu_policies == (EXFIL_DPU,)
    assert len(prs.apu_policies) == 3


def test_permission_text_aliases():
    assert Permission.from_text("rw") is Permission.READ_WRITE
    assert Permission.from_text("ReadOnly") is Permission.READ_ONLY
    assert Permission.from_text("write-only") is Permission.WRITE_ONLY
    with pytest.raises(PolicyError):
        Permission.from_text("execute")


def test_array_forms_agree_with_scalar_forms(mode):
    rng = random.Random(3)
    prs = PolicyRegisterSpace(FFT_APU, [EXFIL_DPU])
    addrs = np.array([0x40020000 + rng.randrange(0x1000) for _ in range(500)]
                     + [0x2001FFE8, 0x20000000, 0x30000000])
    for kind in AccessKind:
        allowed = apu_check_array(prs, 0x2, addrs, kind, mode)
        expected = [apu_check(prs, 0x2, int(a), kind, mode)
                    is ApuVerdict.ALLOW for a in addrs]
        assert allowed.tolist() == expected
    denied = dpu_check_array(prs, 0x2, addrs, 0x0BADBEEF, mode)
    assert denied.tolist() == [
        dpu_check(prs, 0x2, int(a), 0x0BADBEEF, mode) is DpuVerdict.DENY
        for a in addrs]


# Brute-force oracle on a 16-bit toy address space.

TOY_SPACE = np.arange(1 << 16, dtype=np.int64)


def members(addr: int, mask: int, mode: MatchMode) -> np.ndarray:
    """Every address a scope describes, enumerated from its definition."""
    if mode is MatchMode.RANGE_INTERVAL:
        return np.arange(addr & ~mask & 0xFFFF, (addr | mask) + 1)
    positions = [bit for bit in range(16) if (mask >> bit) & 1]
    index = np.arange(1 << len(positions), dtype=np.int64)
    out = np.full(index.shape, addr & ~mask & 0xFFFF, dtype=np.int64)
    for j, bit in enumerate(positions):
        out |= ((index >> j) & 1) << bit
    return out


def oracle_allowed(policies, master, kind, mode) -> np.ndarray:
    allowed = np.zeros(TOY_SPACE.shape, dtype=bool)
    for policy in policies:
        if policy.apumid == master and policy.apuperm.allows(kind):
            allowed[members(policy.apuaddr, policy.apumask, mode)] = True
    return allowed


def random_toy_policies(rng, count):
    policies = []
    for _ in range(count):
        mask = rng.getrandbits(rng.randint(0, 14))
        if rng.random() < 0.3:
            mask &= rng.getrandbits(16)
        policies.append(ApuPolicy(rng.randint(1, 3), rng.getrandbits(16),
                                  mask, rng.choice(list(Permission))))
    return policies


def test_engine_matches_oracle_on_a_few_policy_sets(mode):
    rng = random.Random(11)
    for _ in range(5):
        prs = PolicyRegisterSpace(random_toy_policies(rng, rng.randint(0, 16)))
        for kind in AccessKind:
            assert np.array_equal(
                apu_check_array(prs, 1, TOY_SPACE, kind, mode),
                oracle_allowed(prs.apu_policies, 1, kind, mode))


@pytest.mark.slow
def test_engine_matches_oracle_on_100_policy_sets():
    rng = random.Random(2026)
    mismatches = 0
    for _ in range(100):
        prs = PolicyRegisterSpace(random_toy_policies(rng, rng.randint(0, 16)))
        master = rng.randint(1, 3)
        for mode in MatchMode:
            for kind in AccessKind:
                engine = apu_check_array(prs, master, TOY_SPACE, kind, mode)
                oracle = oracle_allowed(prs.apu_policies, master, kind, mode)
                mismatches += int(np.count_nonzero(engine != oracle))
                for addr in rng.sample(range(1 << 16), 32):
                    scalar = apu_check(prs, master, addr, kind, mode)
                    assert (scalar is ApuVerdict.ALLOW) == oracle[addr]
    assert mismatches == 0


def test_scope_match_on_range_interval():
    assert scope_match(0x40020074, 0xF8B, 0x40020080, RANGE)
    assert not scope_match(0x40020074, 0xF8B, 0x40020080, MASKED)


def random_toy_dpu(rng, count):
    return [DpuPolicy(rng.randint(1, 3), rng.getrandbits(16),
                      rng.getrandbits(rng.randint(0, 12)),
                      rng.getrandbits(8), rng.choice([0, 0xF0, 0xFFFFFFFE]))
            for _ in range(count)]


def test_adding_an_apu_policy_never_revokes_access(mode):
    rng = random.Random(21)
    for _ in range(10):
        policies = random_toy_policies(rng, rng.randint(0, 15))
        before = PolicyRegisterSpace(policies)
        after = PolicyRegisterSpace(policies + random_toy_policies(rng, 1))
        for master in (1, 2, 3):
            for kind in AccessKind:
                was = apu_check_array(before, master, TOY_SPACE, kind, mode)
                now = apu_check_array(after, master, TOY_SPACE, kind, mode)
                assert not np.any(was & ~now)


def test_adding_a_dpu_policy_never_forwards_a_denied_write(mode):
    rng = random.Random(22)
    for _ in range(10):
        policies = random_toy_dpu(rng, rng.randint(0, 15))
        before = PolicyRegisterSpace(dpu_policies=policies)
        after = PolicyRegisterSpace(dpu_policies=policies
                                    + random_toy_dpu(rng, 1))
        values = [p.dpudata for p in after.dpu_policies] + \
            [rng.getrandbits(32) for _ in range(4)]
        for master in (1, 2, 3):
            for wdata in values:
                was = dpu_check_array(before, master, TOY_SPACE, wdata, mode)
                now = dpu_check_array(after, master, TOY_SPACE, wdata, mode)
                assert not np.any(was & ~now)


def test_policy_order_does_not_matter(mode):
    rng = random.Random(23)
    for _ in range(5):
        apu = random_toy_policies(rng, 16)
        dpu = random_toy_dpu(rng, 16)
        prs = PolicyRegisterSpace(apu, dpu)
        shuffled = PolicyRegisterSpace(rng.sample(apu, len(apu)),
                                       rng.sample(dpu, len(dpu)))
        for master in (1, 2, 3):
            for kind in AccessKind:
                assert np.array_equal(
                    apu_check_array(prs, master, TOY_SPACE, kind, mode),
                    apu_check_array(shuffled, master, TOY_SPACE, kind, mode))
            for wdata in {p.dpudata for p in dpu}:
                assert np.array_equal(
                    dpu_check_array(prs, master, TOY_SPACE, wdata, mode),
                    dpu_check_array(shuffled, master, TOY_SPACE, wdata, mode))
        for addr in rng.sample(range(1 << 16), 64):
            assert is_stray(prs, addr, mode) == is_stray(shuffled, addr, mode)


def test_masked_set_is_inside_apu_range_on_8_bits():
    space = np.arange(256)
    for addr in range(256):
        for mask in range(256):
            start, end = apu_range(ApuPolicy(1, addr, mask,
                                             Permission.READ_ONLY))
            inside = scope_match_array(addr, mask, space, MASKED)
            assert inside[start] and inside[end]
            assert not np.any(inside & ((space < start) | (space > end)))


@pytest.mark.slow
def test_masked_set_is_inside_apu_range_on_16_bits():
    # A masked scope containing q has the bounds of the scope (q, mask), so
    # checking every (q, mask) pair covers every scope and member.
    for first in range(0, 1 << 16, 32):
        masks = np.arange(first, first + 32, dtype=np.int64)[:, None]
        start, end = scope_bounds(TOY_SPACE[None, :], masks)
        assert np.all((start <= TOY_SPACE) & (TOY_SPACE <= end))
        assert np.all((start & ~masks) == (TOY_SPACE & ~masks))
        assert np.all((end & ~masks) == (TOY_SPACE & ~masks))
    rng = random.Random(24)
    for _ in range(1000):
        addr, mask = rng.getrandbits(16), rng.getrandbits(16)
        assert apu_range(ApuPolicy(1, addr, mask, Permission.READ_ONLY)) == \
            scope_bounds(addr, mask)
