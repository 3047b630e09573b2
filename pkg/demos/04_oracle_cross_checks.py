"""Cross-check the structured maximizer against brute force on a 2 x 2 pencil.

For r = 2 the inner problem reduces to one real parameter, so a fine scan
is a reliable independent answer. A direct minimization over Delta gives an
upper bound; random perturbations inside the ball should never succeed.
"""
from polydist import mult_distance, penalty_min_distance, random_ball_sampler, random_polynomial, scan_inner_r2
from polydist.optimizer import make_rng

P = random_polynomial(2, 1, make_rng(11))
mu = 0.3 + 0.2j

kappa = mult_distance(P, mu, 2).kappa
print(f"structured maximizer : {kappa:.12g}")
print(f"1-D scan             : {scan_inner_r2(P, mu):.12g}")
print(f"penalty minimization : {penalty_min_distance(P, [mu], 2):.12g}")

hits = random_ball_sampler(P, [mu], 2, 0.9 * kappa, samples=2000)
print(f"random Delta with ||Delta|| = 0.9 kappa making mu double: {hits} of 2000")
