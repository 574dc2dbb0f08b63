#!/usr/bin/env python3
"""Walk through the coding substrate: GF(2^8) arithmetic and RLNC.

Shows scalar/vector field operations, source encoding, in-network
recoding, decoding by Gaussian elimination, and what happens at the
decoder when a polluted packet slips into the mix.
"""

import numpy as np

from ncsecsim import (
    GF256,
    FieldVector,
    PollutionDetectedAtDecode,
    decode,
    encode,
    random_generation,
    recode,
)

rng = np.random.default_rng(2024)

# --- field arithmetic --------------------------------------------------
print("== GF(2^8), reduction polynomial 0x11B ==")
print(f"0x53 * 0xCA = {GF256.mul(0x53, 0xCA):#04x}   (a classic inverse pair)")
print(f"inv(0x02)   = {GF256.inv(0x02):#04x}")
a, b = 0x57, 0x83
print(f"{a:#04x} * {b:#04x} = {GF256.mul(a, b):#04x}, addition is XOR: {a ^ b:#04x}")

u = FieldVector.random(6, GF256, rng)
v = FieldVector.random(6, GF256, rng)
print(f"u         = {u.tolist()}")
print(f"v         = {v.tolist()}")
print(f"u + v     = {(u ^ v).tolist()}")
print(f"3*u       = {u.scale(3).tolist()}")
print(f"dot(u, v) = {u.dot(v)}")

# --- a generation and its coded packets --------------------------------
print("\n== RLNC over one generation (m=4 natives, n=16 symbols) ==")
gen = random_generation("demo", m=4, n=16, spec=GF256, rng=rng)
print("native payloads:")
for row in gen.natives:
    print("  ", list(map(int, row)))

packets = [encode(gen, rng) for _ in range(6)]
print("\nsource emits random combinations; first packet's coefficients:",
      packets[0].coeffs.tolist())

mixed = recode(packets[:3], rng)
print("an intermediate node recodes three of them into coefficients:",
      mixed.coeffs.tolist())

result = decode(packets[:3] + [mixed])
print(f"decode with 4 packets: rank {result.rank} "
      f"({'complete' if result.complete else 'need more packets'})")
if not result.complete:
    result = decode(packets + [mixed])
print("recovered == original natives:", np.array_equal(result.natives, gen.natives))

# --- pollution at the decoder -------------------------------------------
print("\n== pollution: one corrupted payload poisons decoding ==")
polluted = encode(gen, rng)
polluted.payload.elems[5] ^= 0x2A  # flip one payload symbol
try:
    decode(packets[:4] + [polluted, recode([polluted, packets[0]], rng)])
    print("decoder did not notice (possible only if rank hid the conflict)")
except PollutionDetectedAtDecode as exc:
    print(f"decoder raised: {exc}")
