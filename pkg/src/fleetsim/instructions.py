"""Structured operator-instruction wire format.

Three intents are supported: add_task, obstacle_update, and
change_task_priority. A natural-language front end (if any) is an
external adapter that must emit these structures; a small rule-based
translator for the three intents ships here so everything runs offline.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

INTENTS = ("add_task", "obstacle_update", "change_task_priority")


@dataclass
class Instruction:
    intent: str
    payload: dict
    issue_step: int = 0


class InstructionError(ValueError):
    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


def _is_point(v) -> bool:
    return (
        isinstance(v, (list, tuple))
        and len(v) == 2
        and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)
    )


def validate_instruction(ins: Instruction) -> list[str]:
    """Schema check; returns all problems at once (empty list = valid)."""
    errors: list[str] = []
    if ins.intent not in INTENTS:
        return [f"unknown intent {ins.intent!r}"]
    p = ins.payload
    if not isinstance(p, dict):
        return ["payload must be an object"]
    if ins.intent == "add_task":
        if not _is_point(p.get("pickup")):
            errors.append("add_task: 'pickup' must be an [x, y] pair")
        d = p.get("delivery")
        if not (isinstance(d, str) or _is_point(d)):
            errors.append("add_task: 'delivery' must be a label or an [x, y] pair")
        if not isinstance(p.get("type", 0), int) or isinstance(p.get("type", 0), bool):
            errors.append("add_task: 'type' must be an integer")
        if not isinstance(p.get("priority", 1.0), (int, float)) or p.get("priority", 1.0) <= 0:
            errors.append("add_task: 'priority' must be positive")
    elif ins.intent == "obstacle_update":
        poly = p.get("polygon")
        if not isinstance(poly, (list, tuple)) or len(poly) < 3 or not all(_is_point(v) for v in poly):
            errors.append("obstacle_update: 'polygon' must be a list of >=3 [x, y] pairs")
    elif ins.intent == "change_task_priority":
        if not isinstance(p.get("task_id"), int) or isinstance(p.get("task_id"), bool):
            errors.append("change_task_priority: 'task_id' must be an integer")
        w = p.get("priority")
        if not isinstance(w, (int, float)) or isinstance(w, bool) or w <= 0:
            errors.append("change_task_priority: 'priority' must be positive")
    return errors


_NUM = r"[-+]?\d+(?:\.\d+)?"


def translate_text(text: str, issue_step: int = 0) -> Instruction:
    """Rule-based free-text translator for the three intents.

    Good enough for offline tests and demos; a real language-model
    adapter would sit at the same boundary and emit the same structures.
    """
    t = text.lower()
    nums = [float(x) for x in re.findall(_NUM, text)]
    if any(k in t for k in ("wall", "obstacle", "blocked area")):
        if len(nums) >= 6 and len(nums) % 2 == 0:
            poly = [[nums[i], nums[i + 1]] for i in range(0, len(nums), 2)]
            return Instruction("obstacle_update", {"polygon": poly, "kind": "wall"}, issue_step)
        raise InstructionError(["obstacle text needs at least 3 coordinate pairs"])
    if "priority" in t:
        m = re.search(r"task\s*(\d+)", t)
        if m and nums:
            return Instruction(
                "change_task_priority",
                {"task_id": int(m.group(1)), "priority": nums[-1]},
                issue_step,
            )
        raise InstructionError(["priority text needs a task number and a weight"])
    if "task" in t:
        if len(nums) >= 2:
            m = re.search(r"(?:to|over to)\s+(?:point\s+)?([a-z])\b", t)
            delivery = m.group(1).upper() if m else None
            payload = {"pickup": [nums[0], nums[1]], "type": 0}
            if delivery:
                payload["delivery"] = delivery
            elif len(nums) >= 4:
                payload["delivery"] = [nums[2], nums[3]]
            else:
                raise InstructionError(["add-task text needs a delivery point or label"])
            return Instruction("add_task", payload, issue_step)
        raise InstructionError(["add-task text needs pickup coordinates"])
    raise InstructionError([f"could not classify instruction: {text!r}"])
