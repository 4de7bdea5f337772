class DomainError(ValueError):
    """An input lies outside the domain of a model operation.

    ``module`` and ``field`` identify where the offending value entered,
    so the CLI can report it without parsing the message.
    """

    def __init__(self, message, *, module=None, field=None):
        self.module = module
        self.field = field
        prefix = ""
        if module and field:
            prefix = f"[{module}.{field}] "
        elif module or field:
            prefix = f"[{module or field}] "
        super().__init__(prefix + message)


class TransmonRegimeWarning(UserWarning):
    """E_J/E_c is below the Transmon regime (~20)."""


class FitWarning(UserWarning):
    """Data or configuration makes part of a fit poorly constrained."""


def require_positive(module, **values):
    for name, value in values.items():
        if not value > 0:
            raise DomainError(f"must be strictly positive, got {value!r}",
                              module=module, field=name)
