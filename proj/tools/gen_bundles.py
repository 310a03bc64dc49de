#!/usr/bin/env python3
"""Regenerates the synthetic data bundles under data/.

None of these numbers come from a cancer registry. Incidence, stage
distributions and survival are smooth synthetic stand-ins; only the
treatment cost tables and the 30 EUR screening unit cost are the published
Finnish values. Output is deterministic.

    python3 tools/gen_bundles.py [data-dir]
"""

import math
import os
import sys

# Treatment cost tables, rows 46-49 .. 75+, columns stage 0..4.
BANDS = [(46, 49), (50, 54), (55, 59), (60, 64), (65, 69), (70, 74), (75, 99)]
C1 = [
    [24800, 20400, 28400, 33300, 15300],
    [22400, 18000, 26100, 30900, 12900],
    [23300, 18800, 26900, 31800, 13800],
    [20900, 16400, 24500, 29400, 11300],
    [21100, 16600, 24700, 29600, 11600],
    [18700, 14300, 22300, 27200, 9200],
    [14200, 9800, 17800, 22700, 4700],
]
C2 = [
    [4000, 2400, 3300, 6400, 2000],
    [3700, 2000, 2900, 6000, 1600],
    [3400, 1700, 2600, 5700, 1300],
    [3200, 1500, 2400, 5500, 1100],
    [3400, 1800, 2600, 5700, 1300],
    [3200, 1500, 2400, 5500, 1100],
    [3000, 1300, 2200, 5300, 900],
]
C3 = [
    [38100, 33100, 38900, 55400, 29200],
    [31500, 26600, 32400, 48900, 22700],
    [27700, 22800, 28500, 45000, 18900],
    [24600, 19700, 25500, 42000, 15800],
    [26100, 21200, 26900, 43400, 17300],
    [16900, 11900, 17700, 34200, 8000],
    [12300, 7300, 13100, 29600, 3400],
]

HORIZON = 100

MAIN_SCENARIOS = """\
cohort_size = 100000
screening_unit_cost = 30
baseline = 50-69

[scenario 50-69]
label = 50-69 yr
screen = 50-69
extension = none

[scenario 46-69]
label = 46-69 yr
screen = 50-69
extension = younger

[scenario 50-74]
label = 50-74 yr
screen = 50-69
extension = older

[scenario 46-74]
label = 46-74 yr
screen = 50-69
extension = both
"""

SENSITIVITY_SUITE = """\
# One-way sensitivity cases. Each case is applied on top of every scenario
# in the bundle's scenarios.txt.

[sensitivity incidence_up_10]
title = Sensitivity: modelled incidence rates increased by 10%
transform = incidence_scale,0.1,modelled

[sensitivity incidence_down_10]
title = Sensitivity: modelled incidence rates decreased by 10%
transform = incidence_scale,-0.1,modelled

[sensitivity costs_up_10]
title = Sensitivity: treatment costs increased by 10%
transform = cost_scale,0.1,all

[sensitivity costs_up_50]
title = Sensitivity: treatment costs increased by 50%
transform = cost_scale,0.5,all

[sensitivity localized_down_002]
title = Sensitivity: conditional probability of localized cancer decreased by 0.02
transform = stage_shift,-0.02,modelled

[sensitivity localized_up_002]
title = Sensitivity: conditional probability of localized cancer increased by 0.02
transform = stage_shift,0.02,modelled
"""


def fmt(x):
    if x == 0:
        return "0"
    r = repr(float(x))
    if r.endswith(".0"):
        r = r[:-2]
    return r


def normalized(weights):
    total = sum(weights)
    v = [w / total for w in weights]
    v[-1] = 1.0 - sum(v[:-1])
    return v


def forced_pmf(hazards):
    """Discrete PMF from yearly hazards; all remaining mass dies in the last year."""
    pmf = []
    surv = 1.0
    for i, h in enumerate(hazards):
        if i == len(hazards) - 1:
            pmf.append(surv)
        else:
            q = 1.0 - math.exp(-h)
            pmf.append(surv * q)
            surv *= 1.0 - q
    return pmf


def other_hazard(age):
    return 0.0005 * math.exp(0.095 * (age - 40))


# Excess breast cancer hazard in the first 18 years after diagnosis.
BC_HAZARD = [0.03, 0.008, 0.04, 0.30, 0.002]


def bc_hazard(stage, years_since):
    if years_since > 18:
        return 0.0
    return BC_HAZARD[stage] * math.exp(-0.05 * (years_since - 1))


def write(path, header, rows):
    with open(path, "w", newline="\n") as f:
        f.write(header + "\n")
        for r in rows:
            f.write(",".join(r) + "\n")


def write_costs(d):
    for name, table in (("cost_c1.csv", C1), ("cost_c2.csv", C2), ("cost_c3.csv", C3)):
        rows = []
        for (b0, b1), vals in zip(BANDS, table):
            for k, v in enumerate(vals):
                rows.append([str(b0), str(b1), str(k), fmt(v)])
        write(os.path.join(d, name), "band_start,band_end,stage,euros", rows)


def write_bundle(d, starts, incidence, older, both, stages, curves, undiagnosed, scenarios):
    os.makedirs(d, exist_ok=True)
    rows = []
    for s, r in zip(starts, incidence):
        rows.append([str(s), str(s + 1), "baseline", fmt(r)])
    for name, table in (("older", older), ("both", both)):
        for s in sorted(table or {}):
            rows.append([str(s), str(s + 1), name, fmt(table[s])])
    write(os.path.join(d, "incidence.csv"), "age_start,age_end,policy_variant,rate", rows)

    rows = []
    for s, dist in zip(starts, stages):
        for k, p in enumerate(dist):
            rows.append([str(s), str(s + 1), str(k), fmt(p)])
    write(os.path.join(d, "stage_dist.csv"), "age_start,age_end,stage,prob", rows)

    rows = []
    pop = []
    for j, s in enumerate(starts):
        first, pmf = undiagnosed[j]
        for i, p in enumerate(pmf):
            rows.append([str(s), str(s + 1), "-1", str(first + i), fmt(p), "0"])
        lam = {first + i: p for i, p in enumerate(pmf)}
        p0 = lam.get(0, 0.0)
        p1 = lam.get(1, 0.0)
        ps = sum(p for t, p in lam.items() if t >= 2)
        pop.append([str(s), str(s + 1), fmt(p0), fmt(p1), fmt(ps)])
        for k in range(5):
            first_t, pmf_k, bc_k = curves[j][k]
            for i, (p, b) in enumerate(zip(pmf_k, bc_k)):
                rows.append([str(s), str(s + 1), str(k), str(first_t + i), fmt(p), fmt(b)])
    write(os.path.join(d, "survival.csv"),
          "age_start,age_end,stage,t_years,prob_death,prob_bc_given_death", rows)
    write(os.path.join(d, "population_interval.csv"),
          "age_start,age_end,p_die_y0,p_die_y1,p_survive", pop)

    write_costs(d)
    with open(os.path.join(d, "scenarios.txt"), "w", newline="\n") as f:
        f.write(scenarios)


# ---------------------------------------------------------------------------


def smooth_bundle(d):
    starts = list(range(46, 100, 2))

    def base_rate(a):
        if a < 50:
            per_year = 0.0018 + 0.00005 * (a - 46)
        elif a < 70:
            per_year = 0.0024 + 0.00004 * (a - 50)
        else:
            per_year = max(0.0015, 0.0026 - 0.00004 * (a - 70))
        return 2 * per_year

    incidence = [base_rate(a) for a in starts]
    # Screening to 74 keeps incidence up through the screened years and
    # shifts the post-screening decline four years later.
    older = {}
    both = {}
    for a in starts:
        if a < 70:
            continue
        if a <= 74:
            older[a] = 2 * (0.0032 + 0.00002 * (a - 70))
            both[a] = 2 * (0.0031 + 0.00002 * (a - 70))
        else:
            older[a] = base_rate(a - 4) * 0.97
            both[a] = base_rate(a - 4) * 0.96

    def stage_mix(a):
        screened = 50 <= a <= 69
        drift = (a - 46) / 53.0
        if screened:
            w = [0.085, 0.56 - 0.03 * drift, 0.235, 0.007 + 0.004 * drift, 0.113]
        else:
            w = [0.11 + 0.03 * drift, 0.44 - 0.05 * drift, 0.33, 0.014 + 0.01 * drift, 0.106]
        return normalized(w)

    stages = [stage_mix(a) for a in starts]

    curves = []
    undiagnosed = []
    for s in starts:
        per_stage = []
        for k in range(5):
            horizon = HORIZON - s
            hz = []
            bc = []
            for t in range(1, horizon + 1):
                age = s + t - 1
                ho = other_hazard(age)
                hb = bc_hazard(k, t)
                hz.append(ho + hb)
                bc.append(hb / (ho + hb))
            per_stage.append((1, forced_pmf(hz), bc))
        curves.append(per_stage)
        hz = [other_hazard(s + t) for t in range(0, HORIZON - s)]
        undiagnosed.append((0, forced_pmf(hz)))

    write_bundle(d, starts, incidence, older, both, stages, curves, undiagnosed, MAIN_SCENARIOS)
    with open(os.path.join(d, "sensitivity.txt"), "w", newline="\n") as f:
        f.write(SENSITIVITY_SUITE)


def toy_bundle(d):
    starts = [46, 48, 50]
    incidence = [0.05, 0.08, 0.12]
    stages = [
        normalized([0.1, 0.5, 0.3, 0.05, 0.05]),
        normalized([0.05, 0.6, 0.2, 0.1, 0.05]),
        normalized([0.2, 0.3, 0.3, 0.15, 0.05]),
    ]
    curves = []
    undiagnosed = []
    for j, s in enumerate(starts):
        per_stage = []
        for k in range(5):
            # Short supports exercise every branch of the cost schedule.
            pmf = normalized([1 + ((j + k + t) % 3) for t in range(1, 8)])
            bc = [((k + t) % 4) / 4.0 for t in range(1, 8)]
            per_stage.append((1, pmf, bc))
        curves.append(per_stage)
        undiagnosed.append((0, normalized([0.02 + 0.01 * j, 0.03, 0.5, 0.3, 0.15])))
    scenarios = """\
cohort_size = 100000
screening_unit_cost = 30
baseline = screen-50

[scenario screen-50]
label = 50-51 yr
screen = 50-51
extension = none

[scenario screen-46]
label = 46-51 yr
screen = 46-51
extension = none
transform = stage_shift,0.05,46-49
transform = incidence_scale,0.2,46-49

[scenario no-screening]
label = none
screen = 0-0
extension = none
transform = stage_shift,-0.1,50-51
"""
    write_bundle(d, starts, incidence, None, None, stages, curves, undiagnosed, scenarios)


def adversarial_bundle(d):
    starts = list(range(46, 100, 2))
    incidence = []
    for j, a in enumerate(starts):
        incidence.append([0.0, 0.3, 1e-4, 0.05, 0.6][j % 5])
    incidence[-1] = 1.0
    older = {a: [0.5, 0.0, 0.2][i % 3] for i, a in enumerate(s for s in starts if s >= 70)}
    both = {a: [0.1, 0.9, 0.0][i % 3] for i, a in enumerate(s for s in starts if s >= 70)}
    stages = []
    for j, a in enumerate(starts):
        dist = [0.0] * 5
        # Point masses, except every fourth group which splits Localized and
        # Regional so that stage shifts stay valid.
        if j % 4 == 3:
            dist[1] = 0.5
            dist[2] = 0.5
        else:
            dist[(j * 2) % 5] = 1.0
        stages.append(dist)
    curves = []
    undiagnosed = []
    for j, s in enumerate(starts):
        horizon = HORIZON - s
        per_stage = []
        for k in range(5):
            t_death = min(horizon, 1 + (j * 7 + k * 3) % 12)
            per_stage.append((t_death, [1.0], [float((j + k) % 2)]))
        curves.append(per_stage)
        kind = j % 3
        last = horizon - 1
        if kind == 0:
            t_death = min(last, 30)
            undiagnosed.append((t_death, [1.0]))
        elif kind == 1:
            t_far = min(last, 10)
            pmf = [0.0] * (t_far + 1)
            pmf[0] = 0.02
            pmf[1] = 0.03
            pmf[t_far] += 0.95
            undiagnosed.append((0, pmf))
        else:
            t_far = min(last, 5)
            pmf = [0.0] * (t_far + 1)
            pmf[1] = 0.1
            pmf[t_far] += 0.9
            undiagnosed.append((0, pmf))
    write_bundle(d, starts, incidence, older, both, stages, curves, undiagnosed, MAIN_SCENARIOS)


def main():
    root = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(os.path.abspath(__file__)), "..", "data")
    smooth_bundle(os.path.join(root, "synthetic_j27_smooth"))
    toy_bundle(os.path.join(root, "toy_j3"))
    adversarial_bundle(os.path.join(root, "adversarial_j27"))


if __name__ == "__main__":
    main()
