"""Exception hierarchy shared by the estimation and simulation layers."""


class ContactPaintError(Exception):
    """Base class for all package errors."""


class TooFewContacts(ContactPaintError):
    pass


class DegenerateGeometry(ContactPaintError):
    """Contact set carries no rotation information (all points coincide)."""


class VerticalLine(ContactPaintError):
    """Slope-intercept line requested through points sharing one x value."""


class ResetWhileAirborne(ContactPaintError):
    pass


class WaypointTimeout(ContactPaintError):
    pass


class NoContact(ContactPaintError):
    pass


class ScenarioError(ContactPaintError):
    """Invalid scenario or sweep file. ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)
