import pytest

from stable_trees import errors


@pytest.mark.parametrize(
    "error_type",
    [
        errors.ConfigurationError,
        errors.ParameterError,
        errors.DomainError,
        errors.SupportCapError,
        errors.CodewordError,
        errors.TreeStructureError,
        errors.InvariantViolationError,
        errors.UnknownSuiteError,
    ],
)
def test_every_error_derives_from_the_package_base(error_type):
    assert issubclass(error_type, errors.StableTreesError)


def test_parameter_errors_are_value_errors():
    for error_type in (
        errors.ParameterError,
        errors.DomainError,
        errors.CodewordError,
        errors.TreeStructureError,
    ):
        assert issubclass(error_type, ValueError)


def test_quadrature_error_keeps_estimates_in_message():
    error = errors.QuadratureError("mean integral", 1.25, 3e-5)

    assert error.estimate == 1.25
    assert error.error_estimate == 3e-5
    assert "estimate=1.25" in str(error)
    assert "error estimate=3e-05" in str(error)


def test_unknown_suite_error_is_a_key_error():
    with pytest.raises(KeyError):
        raise errors.UnknownSuiteError("nope")
