"""totientlab: seeded RSA semiprime datasets, exact-arithmetic linear
predictors of the totient parameter epsilon, classical totient bounds,
and Fermat-window attack feasibility reports."""

from .attack import (AttackOutcome, InconsistentPhiError, fermat_search,
                     predicted_sum, recover_factors_from_phi, window_report)
from .bounds import (BoundReport, compare, fang_main_term, hatalova_lower,
                     kendall_lower, sierpinski_upper)
from .dataset import (DatasetFormatError, DatasetHeader, DatasetStats,
                      SplitSpec, in_train, read_csv, split, stats, write_csv)
from .metrics import (Histogram, HistogramSpec, MetricsAccumulator,
                      MetricsReport, evaluate, histogram, mae, mse, r2,
                      render_decimal, residuals)
from .ntheory import (PrimalityPolicy, iroot, is_perfect_square,
                      is_probable_prime, isqrt, mod_pow)
from .regress import (FitError, LinearModel, OlsSums, accumulate,
                      fit_conservative, fit_free_ols, fit_half_slope,
                      fit_provable, load_model, phi_lower_bound, predict,
                      save_model)
from .samples import (RngStream, RsaSample, generate_dataset,
                      generate_sample, random_prime)
from .totient import (HyperPoint, epsilon_of_phi, hyper_point,
                      phi_of_epsilon, totient_bruteforce, totient_semiprime)

__version__ = "0.1.0"
