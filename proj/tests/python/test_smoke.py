"""Smoke tests for the python module against hand-pinned reference values."""

import math
import sys

import gbf

X1 = [
    [1, 2, 0.5],
    [2, 1, -1],
    [3, 4, 2],
    [4, 3.5, 0],
    [5, 6, 1.5],
    [6, 5.5, -0.5],
    [7, 8, 3],
    [8, 7, 1],
]
Y1 = [1.2, 0.8, 2.5, 1.9, 3.1, 2.4, 4.0, 3.3]

# model {x1}
M1_GBF = 2.0285063134374278
M1_AIC = 18.288091079249964
# model {x1, x3}
M13_H = 0.020169180604599331
M13_FITTED = [
    1.2766388528648447, 0.9076784991974363, 2.492201423259445, 1.9061873720665459,
    2.839549203552082, 2.2535351523591833, 4.055111773946683, 3.4690977227537836,
]
# best model over the lattice: {x2, x3}
BEST_MASK = 6
BEST_SCORE = 9.5319691544965584
BEST_POSTERIOR = 0.45994039639010875
INCLUSION = [0.49553798410236137, 0.94274652980496253, 0.92812150973058377]

checks = 0


def close(got, want, tol=1e-9):
    global checks
    checks += 1
    if not math.isclose(got, want, rel_tol=tol, abs_tol=tol):
        raise AssertionError(f"got {got!r}, want {want!r} (tol {tol})")


def require(cond, msg):
    global checks
    checks += 1
    if not cond:
        raise AssertionError(msg)


def main():
    require(gbf.__version__ == "1.0.0", "version string")

    res = gbf.select(X1, Y1, criterion="gbf", top_k=8)
    require(res["scored"] == 8, "all 8 submodels scored")
    best = res["models"][0]
    require(best["bitmask"] == BEST_MASK, f"best bitmask {best['bitmask']}")
    require(best["columns"] == [1, 2], "best columns")
    close(best["score"], BEST_SCORE)
    close(best["posterior"], BEST_POSTERIOR)
    for got, want in zip(res["inclusion"], INCLUSION):
        close(got, want)
    post_sum = sum(m["posterior"] for m in res["models"])
    close(post_sum, 1.0, tol=1e-12)

    sc = gbf.scores(X1, Y1, model=[0])
    close(sc["gbf"], M1_GBF)
    close(sc["aic"], M1_AIC)
    require(sc["q"] == 1, "q of {x1}")

    est = gbf.estimate(X1, Y1, model=[0, 2])
    close(est["H"], M13_H)
    require(len(est["fitted"]) == 8, "fitted length")
    for got, want in zip(est["fitted"], M13_FITTED):
        close(float(got), want)
    for w in est["weights"]:
        require(0.0 < float(w) < 1.0, "weights in (0,1)")

    sim = gbf.simulate("simple", n=20, p=5, true_cols=[0, 1], reps=4, seed=7,
                       criteria=["gbf", "aic"])
    require(sim["failures"] == 0, "no failed replications")
    require(set(sim["criteria"]) == {"gbf", "aic"}, "criteria keys")
    for d in sim["criteria"].values():
        require(0.0 <= d["freq_first"] <= 1.0, "freq_first in [0,1]")
        require(abs(sum(d["size_freq"]) - 1.0) < 1e-12, "size_freq sums to 1")

    # determinism: repeated and multi-threaded runs agree exactly
    sim2 = gbf.simulate("simple", n=20, p=5, true_cols=[0, 1], reps=4, seed=7,
                        criteria=["gbf", "aic"])
    require(sim == sim2, "simulate reruns identical")
    r1 = gbf.select(X1, Y1, threads=1, top_k=8)
    r4 = gbf.select(X1, Y1, threads=4, top_k=8)
    require(r1 == r4, "thread count does not change results")

    # error paths surface as GbfError
    for bad in (
        lambda: gbf.select(X1, Y1, criterion="nope"),
        lambda: gbf.select(X1, Y1, a=-0.4),
        lambda: gbf.scores(X1, Y1, model=[7]),
        lambda: gbf.simulate("simple", n=2, p=3, true_cols=[0]),
    ):
        try:
            bad()
        except gbf.GbfError:
            require(True, "")
        else:
            raise AssertionError("expected GbfError")

    # duplicated predictor -> rank deficient
    Xdup = [(row[0], row[0], row[2]) for row in X1]
    try:
        gbf.scores(Xdup, Y1, model=[0, 1])
    except gbf.GbfError as e:
        require("rank" in str(e), "rank-deficiency message")
    else:
        raise AssertionError("expected rank-deficiency error")

    print(f"python smoke: {checks} checks passed")


if __name__ == "__main__":
    sys.exit(main())
