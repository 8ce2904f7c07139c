"""
Design matrix for the ANCOVA regression of Y on [1, A, W]
"""

import numpy as np

from ancova_check.models.trial import DesignMatrix, TrialDataset

INTERCEPT = '(Intercept)'
ARM = 'A'


def design_matrix(data: TrialDataset) -> DesignMatrix:
    """Columns [1, A, W1..Wk] in observation order, W left uncentred"""
    values = np.column_stack((np.ones(data.n), data.arms, data.covariates))
    return DesignMatrix(values, (INTERCEPT, ARM) + tuple(data.covariate_names))
