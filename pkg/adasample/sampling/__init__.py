"""Batch-size control: variance tests, the batch update and p schedules."""

from .controller import (
    BatchController,
    BatchTest,
    TestReport,
    decay_p,
    resample,
    update_batch,
    update_running_average,
)
from .schedules import (
    cumulative_success_probability,
    inverse_square_closed_form,
    inverse_square_product,
    p_at,
)
from .statistics import (
    DenseGradients,
    acute_angle_statistic,
    augmented_inner_product_test_proposal,
    grad_size_proposal,
    hess_size_proposal,
    hessian_statistic,
    inner_product_test_proposal,
    norm_test_proposal,
    raw_grad_size,
    raw_hess_size,
)

__all__ = [
    "BatchController",
    "BatchTest",
    "TestReport",
    "decay_p",
    "resample",
    "update_batch",
    "update_running_average",
    "cumulative_success_probability",
    "inverse_square_closed_form",
    "inverse_square_product",
    "p_at",
    "DenseGradients",
    "acute_angle_statistic",
    "augmented_inner_product_test_proposal",
    "grad_size_proposal",
    "hess_size_proposal",
    "hessian_statistic",
    "inner_product_test_proposal",
    "norm_test_proposal",
    "raw_grad_size",
    "raw_hess_size",
]
