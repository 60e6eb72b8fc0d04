"""Smoke test for the adaptopt Python extension.

Build and install first:  pip install maturin && maturin develop -m crates/python/Cargo.toml
"""

import adaptopt

W3_FRONT = [(45.0, 6.0), (60.0, 3.0), (75.0, 1.0), (95.0, 0.0)]


def main():
    problem = adaptopt.CobotProblem.w3()
    assert [name for name, _ in problem.objectives] == ["makespan_seconds", "ergonomic_penalty"], problem.objectives
    assert problem.genotype_length == 3

    exact = adaptopt.brute_force(problem)
    assert [tuple(obj) for _, obj in exact] == W3_FRONT, exact

    for algorithm in ("nsga2", "nsga3"):
        front, stats = adaptopt.optimize(problem, algorithm, population_size=20, generations=30, seed=7, reference_divisions=6)
        assert [tuple(obj) for _, obj in front] == W3_FRONT, (algorithm, front)
        assert len(stats) == 31
        hv = [s[3] for s in stats]
        assert all(b >= a for a, b in zip(hv, hv[1:])), hv

    assert adaptopt.hypervolume_2d([list(p) for p in W3_FRONT], [100.0, 7.0]) == 230.0

    for bits, obj in exact:
        assert problem.evaluate(bits) == obj
        decoded = problem.decode(bits)
        assert problem.evaluate_workflow(decoded) == obj
        again = adaptopt.Workflow.from_xml(decoded.to_xml())
        assert again == decoded and again.violations() == []

    wf = problem.base_workflow.set_property("a1", "Torque", 2.5).set_property("a1", "Checked", True)
    assert wf.get_property("a1", "Torque") == 2.5
    assert wf.get_property("a1", "Checked") is True
    assert wf.get_property("a1", "missing") is None

    try:
        problem.evaluate("10")
    except ValueError:
        pass
    else:
        raise AssertionError("short genotype accepted")

    assert adaptopt.dominates([1.0, 1.0], [1.0, 2.0])
    assert not adaptopt.dominates([1.0, 1.0], [1.0, 1.0])
    assert adaptopt.non_dominated_sort([[1.0, 2.0], [2.0, 1.0], [3.0, 3.0]]) == [[0, 1], [2]]
    assert len(adaptopt.das_dennis(3, 4)) == 15
    crowd = adaptopt.crowding_distance([list(p) for p in W3_FRONT])
    assert crowd[0] == float("inf") and crowd[-1] == float("inf")

    print("python smoke test: OK")


if __name__ == "__main__":
    main()
