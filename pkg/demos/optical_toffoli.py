"""The postselected linear-optics Toffoli and its imperfections.

Starts from the design point (vertical reflectivity 2/3, horizontal 0,
perfect interference), where the coincidence channel is exactly
Toffoli/3 with success 1/9, then turns each imperfection knob and
finally dials in spatial phase jitter to show how unmodeled dephasing
pulls the replication fidelities down.

Run:  python3 demos/optical_toffoli.py
"""
import argparse
import dataclasses
import math

import numpy as np

from phaserep import (
    OpticsParams,
    choi_from_kraus,
    cu_phase,
    effective_toffoli,
    kron,
    phase_gate,
    process_fidelity,
    replication_experiment_channel,
    standard_phases,
    toffoli,
)


def design_point() -> None:
    kraus, success = effective_toffoli(OpticsParams.ideal())
    scaled = kraus[0].matrix * 3.0
    print("ideal parameters:")
    print(f"  Kraus operators: {len(kraus)}")
    print(f"  success probability: {success:.6f} (= 1/9)")
    print(f"  3 * K equals the Toffoli exactly: "
          f"{np.max(np.abs(scaled - toffoli().matrix)) < 1e-12}")
    projected = replication_experiment_channel(0.7, OpticsParams.ideal())
    full = replication_experiment_channel(0.7, OpticsParams.ideal(),
                                          project=False)
    print(f"  idler projection halves the success weight: "
          f"{abs(projected.trace - full.trace / 2.0) < 1e-12}")


def measured_point() -> None:
    params = OpticsParams.measured()
    kraus, success = effective_toffoli(params)
    fid = process_fidelity(choi_from_kraus(kraus), toffoli())
    print(f"\ncalibrated parameters (r_v={params.r_v}, r_h={params.r_h}, "
          f"visibility={params.visibility}):")
    print(f"  Kraus operators: {len(kraus)}")
    print(f"  Toffoli fidelity: {fid:.6f}")
    print(f"  success probability: {success:.6f}")


def knob_sweep() -> None:
    print("\none knob at a time (phase pi/2, controlled-gate fidelity):")
    phi = math.pi / 2
    grids = {
        "r_v": [2.0 / 3.0, 0.60, 0.55, 0.50],
        "r_h": [0.0, 0.05, 0.10, 0.15],
        "visibility": [1.0, 0.95, 0.90, 0.85],
    }
    for name, grid in grids.items():
        values = []
        for value in grid:
            params = dataclasses.replace(OpticsParams.ideal(),
                                         **{name: value})
            channel = replication_experiment_channel(phi, params)
            values.append(process_fidelity(channel, cu_phase(phi)))
        cells = "  ".join(f"{g:.3f}:{v:.4f}" for g, v in zip(grid, values))
        print(f"  {name:>10}: {cells}")


def jitter_dial() -> None:
    print("\nspatial phase jitter on top of the calibrated parameters")
    print("(means of the channel fidelities over the 8 standard phases):")
    print("  sigma    mean F_CU   mean F_UU")
    for sigma in (0.0, 0.25, 0.5, 0.65, 0.75, 1.0):
        params = dataclasses.replace(OpticsParams.measured(),
                                     phase_jitter_sigma=sigma)
        f_cu, f_uu = [], []
        for phi in standard_phases():
            channel = replication_experiment_channel(phi, params)
            u = phase_gate(phi)
            f_cu.append(process_fidelity(channel, cu_phase(phi)))
            f_uu.append(process_fidelity(channel, kron(u, u)))
        print(f"  {sigma:5.2f}    {np.mean(f_cu):.6f}    "
              f"{np.mean(f_uu):.6f}")
    print("with no jitter the three calibrated knobs leave the means "
          "near 0.965/0.651; real setups carry extra dephasing, and "
          "sigma ~ 0.65 is enough to pull F_CU below 0.88")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.parse_args()
    design_point()
    measured_point()
    knob_sweep()
    jitter_dial()


if __name__ == "__main__":
    main()
