"""The classical reference chain: superposed QPSK with SIC detection.

No learning anywhere. Each user gets a QPSK codebook, the transmitter
sends sqrt(p1) * q1 + sqrt(p2) * q2 with more power on the weak user,
and the receiver decodes the strong component first, subtracts it, then
decodes the rest. Exact joint ML on the superposed codebook gives the
best any detector could do on the same transmit signal.

Also checks the simulator against the closed-form single-user QPSK
symbol error rate, which is the standard sanity anchor.
"""

import noma_ae as na
from noma_ae.baseline import PowerAllocation, bpsk_table, qpsk_ser_analytic

dims = na.SystemDims(k=(2, 2), n=2)
tables = [bpsk_table(2), bpsk_table(2)]
alloc = PowerAllocation((0.2, 0.8))

print("single-user QPSK anchor (Monte-Carlo vs closed form)")
for esn0_db in (4.0, 8.0):
    mc = na.qpsk_mc_ser(esn0_db, trials=200_000, seed=0)
    exact = qpsk_ser_analytic(esn0_db)
    print(f"  Es/N0 {esn0_db:>4.0f} dB: simulated {mc.bler[0]:.5f}, "
          f"analytic {exact:.5f}")

print("\ntwo-user superposition, power split p = (0.2, 0.8)")
print(f"{'SNR1 (dB)':>10} {'u1 SIC':>9} {'u2 SIC':>9} {'u1 ML':>9} {'u2 ML':>9}")
for snr1 in (14.0, 18.0, 22.0):
    channel = na.ChannelSpec.from_delta(snr1, 9.0, 2)
    sic = na.estimate_bler_classical(dims, tables, alloc, channel,
                                     trials=200_000, seed=1)
    ml = na.estimate_bler_classical(dims, tables, alloc, channel,
                                    trials=200_000, seed=1,
                                    decoder="ml_oracle")
    print(f"{snr1:>10.0f} {sic.bler[0]:>9.5f} {sic.bler[1]:>9.5f} "
          f"{ml.bler[0]:>9.5f} {ml.bler[1]:>9.5f}")

print("\nwith antipodal components per dimension and the larger power on the")
print("weaker user, sequential SIC decisions trace exactly the joint ML")
print("regions, so the two detectors agree trial for trial. the superposed")
print("codebook is a clean 4-PAM lattice per dimension; learned systems")
print("have to discover comparable structure from data.")
