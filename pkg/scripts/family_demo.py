"""Build each seeded family, classify it and certify the m-th powers along the seed orbit."""

from powerorbits import families as fam
from powerorbits.orbits import certify_progressions
from powerorbits.portrait import classify_mu_type, orbifold_signature
from powerorbits.ratmap import format_map

INSTANCES = [
    fam.lattes_244(-3),
    fam.lattes_333_fixed2cycle(1),
    fam.lattes_333_3cycle(1),
    fam.lattes_333_deg9(3),
    fam.family_type3(3),
    fam.family_type3(2),
    fam.family_type76(1),
    fam.remark_family(2, 3),
]


def main() -> None:
    for inst in INSTANCES:
        mt = classify_mu_type(inst.map, inst.m)
        cert = certify_progressions(inst.map, inst.seed, inst.m, horizon=9)
        found = cert.certified.describe() if cert.certified else f"uncertified ({cert.reason})"
        params = ", ".join(f"{k}={v}" for k, v in inst.params.items())
        print(f"{inst.name}({params})")
        print(f"  phi       = {format_map(inst.map)}")
        print(f"  m = {inst.m}, tag {mt.tag} (expected {inst.tag}), signature {orbifold_signature(inst.map)}")
        print(f"  seed {inst.seed}: {found}, mode {cert.mode}")


if __name__ == "__main__":
    main()
