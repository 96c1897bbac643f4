"""Shared analyzer conventions.

Analyzers follow the scikit-learn estimator protocol: hyperparameters are
plain ``__init__`` arguments (so ``get_params``/``set_params``/``clone``
work), results are set by ``fit`` as trailing-underscore attributes, and
``fit`` returns ``self``. Methods that design their own experiment expose
``design``/``sample`` to produce the evaluation matrix, so an expensive model
can be run elsewhere and the outputs handed back to ``fit``.
"""

from sklearn.base import BaseEstimator


class BaseAnalyzer(BaseEstimator):

    def _require_fitted(self, attr):
        if getattr(self, attr, None) is None:
            raise AttributeError(
                f"{type(self).__name__} is not fitted yet; call fit or analyze first"
            )
