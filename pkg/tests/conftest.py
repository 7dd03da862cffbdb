import os
from dataclasses import replace

import pytest

from minicurry.session import Config, Session

CORPUS = os.path.join(os.path.dirname(__file__), "corpus")


def corpus(name: str) -> str:
    return os.path.join(CORPUS, name)


_SESSIONS = {}


def session(name=None, **config) -> Session:
    """A cached session with ``name`` loaded (or only the prelude)."""
    key = (name, tuple(sorted(config.items())))
    s = _SESSIONS.get(key)
    if s is None:
        s = Session(Config(**config))
        if name is not None:
            s.load_file(corpus(name))
        _SESSIONS[key] = s
    return s


def answers(name, goal, **overrides):
    s = session(name)
    generators = overrides.pop("generators", False)
    overrides.setdefault("max_answers", None)
    return [a.line() for a in s.run(goal, replace(s.config, **overrides), generators).answers]


def source_session(text: str, **config) -> Session:
    s = Session(Config(**config))
    s.load_source(text, "<test>")
    return s


@pytest.fixture
def peano():
    return session("peano.mcy")
