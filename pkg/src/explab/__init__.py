"""Exponential sums with multiplicative coefficients at desk scale."""

from .arith import Factorization, UnitGroup, factorize, prime_pi, primes_up_to, sieve_primes, unit_group
from .characters import (DirichletCharacter, conductor, enumerate_characters, gauss_sum,
                         primitive_characters, ramanujan_sum)
from .constructions import (Construction, character_pretender, example_1, example_1b, example_2,
                            example_2_3, example_2b, hybrid_example, montgomery_vaughan,
                            smooth_minor_extremal, steinhaus_sampler)
from .errors import ConstructionError, DomainError, ExplabError, ResourceError
from .expsum import (RationalApprox, SumResult, best_approx, char_identity_check, decompose_log,
                     decompose_thm_unweighted, e_of, exp_sum, witness_search)
from .multfun import (MultiplicativeFunction, cm_remainder, evaluate, kappa_decompose,
                      min_distance_t, min_over_characters, pretentious_distance, steinhaus)
from .smooth import SmoothCountQuery, dickman_rho, psi, saddle_point, smooth_enumerate

__all__ = [
    "Construction", "ConstructionError", "DirichletCharacter", "DomainError", "ExplabError",
    "Factorization", "MultiplicativeFunction", "RationalApprox", "ResourceError", "SmoothCountQuery",
    "SumResult", "UnitGroup", "best_approx", "char_identity_check", "character_pretender",
    "cm_remainder", "conductor", "decompose_log", "decompose_thm_unweighted", "dickman_rho", "e_of",
    "enumerate_characters", "evaluate", "example_1", "example_1b", "example_2", "example_2_3",
    "example_2b", "exp_sum", "factorize", "gauss_sum", "hybrid_example", "kappa_decompose",
    "min_distance_t", "min_over_characters", "montgomery_vaughan", "pretentious_distance",
    "prime_pi", "primes_up_to", "primitive_characters", "psi", "ramanujan_sum", "saddle_point",
    "sieve_primes", "smooth_enumerate", "smooth_minor_extremal", "steinhaus", "steinhaus_sampler",
    "unit_group", "witness_search",
]
