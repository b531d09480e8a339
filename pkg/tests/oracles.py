"""Independent reference implementations the tests check the simulator against.

These deliberately avoid the library's interval logic: outcomes are computed
by walking every microsecond, and DCF saturation throughput comes from plain
slot accounting.
"""

from __future__ import annotations

import random

from coexsim.medium import (BELOW_SENSITIVITY, CORRUPTED, DECODED, DeliveryOutcome,
                            FrameKind, MediumModel, PathLossModel, Position,
                            RadioInterface, RadioKind, SpillageTable, Transmission,
                            received_power)


def oracle_rx_power(tx: Transmission, src: RadioInterface, dst: RadioInterface,
                    medium: MediumModel) -> float:
    coupling = None
    if src.platform is not None and src.platform == dst.platform:
        coupling = medium.colocated_coupling_db
    return received_power(tx.power_dbm, src.position, dst.position, tx.channel_mhz,
                          dst.channel_mhz, medium.path_loss_model, medium.spillage,
                          coupling_db=coupling)


def brute_force_outcomes(active, interfaces, window, medium) -> list[DeliveryOutcome]:
    """Exhaustive per-microsecond evaluation of every addressed transmission.

    At each instant the strongest single overlapping interferer is compared
    against the signal; a receiver that is itself on air at any overlapping
    instant never decodes.
    """
    w0, w1 = window
    ordered = sorted((tx for tx in active if tx.dest is not None and tx.dest in interfaces),
                     key=lambda t: (t.start_us, t.source, t.dest))
    outcomes = []
    for tx in ordered:
        rx_if = interfaces[tx.dest]
        sig = oracle_rx_power(tx, interfaces[tx.source], rx_if, medium)
        if sig < rx_if.decode_sensitivity_dbm:
            outcomes.append(DeliveryOutcome(tx.dest, BELOW_SENSITIVITY, sig))
            continue
        corrupted = False
        for t in range(max(tx.start_us, w0), min(tx.end_us, w1)):
            strongest = None
            for u in active:
                if u is tx or not (u.start_us <= t < u.end_us):
                    continue
                if u.source == tx.dest:
                    strongest = float("inf")
                    break
                p = oracle_rx_power(u, interfaces[u.source], rx_if, medium)
                if strongest is None or p > strongest:
                    strongest = p
            if strongest is not None and sig - strongest < medium.sinr_threshold_db:
                corrupted = True
                break
        outcomes.append(DeliveryOutcome(tx.dest, CORRUPTED if corrupted else DECODED, sig))
    return outcomes


def dcf_saturation_share(frame_airtime_us: int, difs_us: int = 50, slot_us: int = 20,
                         cw_min: int = 15) -> float:
    """Closed-form airtime share of a lone saturated DCF transmitter.

    Each cycle is DIFS + the mean post-success backoff + the frame itself.
    """
    mean_backoff = cw_min / 2 * slot_us
    return frame_airtime_us / (frame_airtime_us + difs_us + mean_backoff)


_CHANNELS = (2380.0, 2412.0, 2437.0)


def random_micro_instance(rng: random.Random):
    """A small random delivery scene: 4-6 radios, 2-4 overlapping transmissions."""
    medium = MediumModel(path_loss_model=PathLossModel(kind="log-distance",
                                                       exponent=3.0),
                         spillage=SpillageTable(), sinr_threshold_db=10.0)
    n_if = rng.randint(4, 6)
    interfaces = {}
    for i in range(n_if):
        iid = f"r{i}"
        interfaces[iid] = RadioInterface(
            id=iid, kind=RadioKind.WIFI,
            position=Position(rng.uniform(-8.0, 8.0), rng.uniform(-8.0, 8.0)),
            channel_mhz=rng.choice(_CHANNELS),
            tx_power_dbm=rng.choice((-10.0, 1.0, 20.0, 23.0)),
            decode_sensitivity_dbm=rng.choice((-85.0, -90.0)),
            cca_threshold_dbm=-82.0)
    ids = sorted(interfaces)
    txs = []
    for _ in range(rng.randint(2, 4)):
        src = rng.choice(ids)
        dest = rng.choice([i for i in ids if i != src] + [None])
        txs.append(Transmission(
            source=src, kind=FrameKind.DATA,
            start_us=rng.randint(0, 60), airtime_us=rng.randint(5, 40),
            power_dbm=interfaces[src].tx_power_dbm,
            channel_mhz=interfaces[src].channel_mhz, dest=dest))
    return txs, interfaces, (0, 120), medium
