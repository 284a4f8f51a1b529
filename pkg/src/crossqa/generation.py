"""Generator prompt assembly and the answer-generation call.

The prompt is ``question: {q}`` followed by `` [SEP] {candidate}`` in
candidate-set order.  The budget is in characters (backends own their token
budgets and may re-truncate); candidates are appended whole until one no
longer fits, which is cut to the remaining room, dropping the rest.
"""

from dataclasses import dataclass

from . import backends

DEFAULT_PROMPT_BUDGET = 2096
PROMPT_PREFIX = "question: "
SEPARATOR = " [SEP] "


class PromptBudgetError(ValueError):
    pass


@dataclass(frozen=True)
class Prompt:
    text: str
    truncated: bool


@dataclass(frozen=True)
class GeneratedAnswer:
    text: str
    lang: str
    closed_book: bool


def assemble_prompt(question, m, budget=DEFAULT_PROMPT_BUDGET,
                    prefix=PROMPT_PREFIX, separator=SEPARATOR):
    """Serialize question + candidate set into the generator prompt.

    ``truncated`` is set iff any candidate was cut or dropped by the budget.
    """
    base = prefix + question
    if len(base) > budget:
        raise PromptBudgetError(
            f"budget {budget} too small for question of length "
            f"{len(question)}")
    parts = [base]
    length = len(base)
    truncated = False
    for cand in m.candidates:
        piece = separator + cand.text
        if length + len(piece) <= budget:
            parts.append(piece)
            length += len(piece)
        else:
            room = budget - length - len(separator)
            if room > 0:
                parts.append(separator + cand.text[:room])
            truncated = True
            break
    return Prompt(text="".join(parts), truncated=truncated)


def generate_answer(question, m, backend,
                    max_new_chars=backends.DEFAULT_MAX_NEW_CHARS):
    """Obtain the answer for a question from its aggregated candidate set.

    Empty candidate sets run closed-book.  The backend's contract is to
    answer in the question language; the engine records it, never verifies.
    """
    wire_candidates = [{"text": c.text, "lang": c.lang}
                       for c in m.candidates]
    answer = backend.generate(question.text, wire_candidates, question.lang,
                              max_new_chars)
    return GeneratedAnswer(text=answer, lang=question.lang,
                           closed_book=not m.candidates)
