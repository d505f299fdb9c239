from __future__ import annotations

import pytest

from helpers import balls_model, enrollment_model
from topoflow import examples


@pytest.fixture
def balls():
    return balls_model()


@pytest.fixture
def enrollment():
    return enrollment_model()


@pytest.fixture
def meeting():
    return examples.meeting_model()


@pytest.fixture
def education():
    return examples.education_model()
