# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2025 The Linux Foundation

"""Tests for the exception hierarchy and numeric error translation."""

import numpy as np
import pytest

from fano_congruence.error_handling import (
    EXIT_ERROR,
    EXIT_INCONCLUSIVE,
    FanoCongruenceError,
    FrameError,
    InconclusiveError,
    MembershipError,
    NonLefschetzError,
    SurfaceFileError,
    exit_code_for,
    handle_numeric_errors,
)


class TestExitCodes:
    """Mapping of errors to CLI exit codes."""

    def test_inconclusive(self):
        """Test numeric failures exit with the inconclusive code."""
        assert exit_code_for(InconclusiveError("few starts converged")) == EXIT_INCONCLUSIVE
        assert exit_code_for(NonLefschetzError("cuspidal member")) == EXIT_INCONCLUSIVE

    def test_errors(self):
        """Test everything else is an error."""
        assert exit_code_for(MembershipError("off S(Y)", residual=0.3)) == EXIT_ERROR
        assert exit_code_for(KeyError("x")) == EXIT_ERROR

    def test_context_attributes(self):
        """Test errors carry their context."""
        assert MembershipError("off", residual=0.5).residual == 0.5
        assert SurfaceFileError("bad entry", entry=3).entry == 3


class TestHandleNumericErrors:
    """Translation of numeric failures."""

    def test_linalg_error(self):
        """Test LinAlgError becomes InconclusiveError."""

        @handle_numeric_errors
        def solve():
            return np.linalg.solve(np.zeros((2, 2)), np.ones(2))

        with pytest.raises(InconclusiveError, match="solve"):
            solve()

    def test_zero_division(self):
        """Test ZeroDivisionError becomes FrameError."""

        @handle_numeric_errors
        def pivot():
            return 1 / 0

        with pytest.raises(FrameError):
            pivot()

    def test_own_errors_pass_through(self):
        """Test package errors are not rewrapped."""

        @handle_numeric_errors
        def fail():
            raise MembershipError("off S(Y)", residual=1.0)

        with pytest.raises(MembershipError) as excinfo:
            fail()
        assert isinstance(excinfo.value, FanoCongruenceError)

    def test_other_errors_untouched(self):
        """Test unrelated exceptions propagate unchanged."""

        @handle_numeric_errors
        def fail():
            raise KeyError("missing")

        with pytest.raises(KeyError):
            fail()
