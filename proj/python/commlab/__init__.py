"""Python bindings for the commlab core.

Every call returns plain dicts decoded from the core's JSON.
"""

import json
from pathlib import Path

from . import _core
from ._core import ManifestError

__all__ = ["ManifestError", "Service", "check_task", "profiles", "run_script", "run_task", "validate_course"]


def run_script(source, profile="comm", seed=None):
    return json.loads(_core.run_script(source, profile, seed))


def run_task(task_file, source, seed=None):
    return json.loads(_core.run_task(str(task_file), source, seed))


def check_task(task_file, source, seed=None):
    return json.loads(_core.check_task(str(task_file), source, seed))


def validate_course(course_dir):
    return json.loads(_core.validate_course(str(course_dir)))


def profiles():
    return list(_core.profiles())


class Service:
    """The /api/v1 handlers in-process. Methods return (status, body)."""

    def __init__(self, course_dir, data_dir=None, admin_token=""):
        self._svc = _core.Service(str(course_dir), None if data_dir is None else str(data_dir), admin_token)

    @staticmethod
    def _out(res):
        status, body = res
        return status, json.loads(body)

    def course(self, student=""):
        return self._out(self._svc.get_course(student))

    def task(self, lab, task, student=""):
        return self._out(self._svc.get_task(lab, task, student))

    def run(self, student, task, source, seed=None):
        return self._out(self._svc.run(json.dumps(_body(student, task, source, seed))))

    def check(self, student, task, source, seed=None):
        return self._out(self._svc.check(json.dumps(_body(student, task, source, seed))))

    def quiz(self, quiz_id, student, answer):
        return self._out(self._svc.quiz(quiz_id, json.dumps({"student": student, "answer": answer})))

    def progress(self, student):
        return self._out(self._svc.progress(student))

    def exam(self, student, fraction, token):
        return self._out(self._svc.exam(json.dumps({"student": student, "fraction": fraction}), token))


def _body(student, task, source, seed):
    body = {"student": student, "task": task, "source": source}
    if seed is not None:
        body["seed"] = seed
    return body
