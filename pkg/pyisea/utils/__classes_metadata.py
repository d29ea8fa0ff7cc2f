# -*- coding: utf-8 -*-
"""
Author: PyISEA Team
================================
Metadata strings
"""

# For SystemConfig class
chiplets_md = ("Computing chiplets", "Number of commodity core chiplets")
cores_md = ("Cores per chiplet", "Core masters hosted by each chiplet")
width_md = ("Master ID width", "HMASTER width in bits")
proc0_md = ("PROC-0 master ID", "Privileged, interposer-resident core")
si_md = ("SI master ID", "Privileged secure interface of the TCU")
map_md = ("Memory map", "Non-overlapping, size-aligned slave regions")
apu_cap_md = ("APU capacity", "APU policies per PRS, 16, 32, 64 or 128")
dpu_cap_md = ("DPU capacity", "DPU policies per PRS, 16, 32, 64 or 128")
ecc_en_md = ("ECC enable", "Hamming ECC on shared-memory slaves")
ecc_mode_md = ("ECC mode", "Should be 'detect_double' or 'correct_single'")
iso_md = ("Isolation threshold", "Blocked requests before isolation, "
          "0 disables isolation")
match_md = ("Match mode", "Should be 'masked' or 'range'")
limit_md = ("Cycle limit", "Simulation stops after this many cycles")

# For MemoryRegion class
slave_md = ("Slave ID", "HSEL index of the region")
base_md = ("Base address", "Aligned to the region size")
size_md = ("Size", "Should be a power of two [bytes]")
kind_md = ("Kind", "Should be 'memory' or 'srs'")
