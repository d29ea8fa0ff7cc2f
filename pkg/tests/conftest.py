# -*- coding: utf-8 -*-
import pytest

from pyisea.bus.transfer import BusRequest
from pyisea.config import SystemConfig
from pyisea.policy.core import ApuPolicy, DpuPolicy, MatchMode, Permission, \
    PolicyRegisterSpace
from pyisea.system import System

RW = Permission.READ_WRITE

# Policies of the FFT application: two ranges of slave 1 for core 2,
# leaving 0x4002_0070 out.
FFT_APU = (ApuPolicy(0x2, 0x40020000, 0x0000006C, RW),
           ApuPolicy(0x2, 0x40020074, 0x00000F8B, RW))
EXFIL_DPU = DpuPolicy(0x2, 0x20000000, 0x0FFFFFFF, 0x0BADBEEF, 0x00000000)
SEMAPHORE_DPU = DpuPolicy(0x2, 0x5000009C, 0x3, 0x00000000, 0xFFFFFFFE)


@pytest.fixture
def config():
    return SystemConfig()


@pytest.fixture(params=list(MatchMode), ids=lambda m: m.value)
def mode(request):
    return request.param


@pytest.fixture
def system(config):
    return System(config)


def install(system, apu=(), dpu=()):
    """Installs policies, routed to the slave decoding each scope start."""
    apu_by = {}
    dpu_by = {}
    for policy in apu:
        sid, _ = system.locate(policy.apuaddr & ~policy.apumask)
        apu_by.setdefault(sid, []).append(policy)
    for policy in dpu:
        sid, _ = system.locate(policy.dpuaddr & ~policy.dpuamask)
        dpu_by.setdefault(sid, []).append(policy)
    images = {sid: PolicyRegisterSpace(apu_by.get(sid, ()),
                                       dpu_by.get(sid, ()),
                                       system.config.apu_capacity,
                                       system.config.dpu_capacity, sid)
              for sid in set(apu_by) | set(dpu_by)}
    system.install_policies(images)


def transfer(system, master, request):
    """Issues one request, runs to idle and returns its handle."""
    handle = system.issue(master, request)
    system.run()
    return handle


@pytest.fixture
def guarded_system(system):
    """FFT policies on slave 1 plus the exfiltration guard on slave 0."""
    install(system,
            apu=FFT_APU + (ApuPolicy(0x1, 0x40020070, 0x3, RW),
                           ApuPolicy(0x2, 0x20000000, 0x000FFFFF, RW)),
            dpu=(EXFIL_DPU,))
    return system


read = BusRequest.read
write = BusRequest.write
