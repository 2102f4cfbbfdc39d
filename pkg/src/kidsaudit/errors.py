"""Exception hierarchy shared across the audit modules."""


class AuditError(Exception):
    """Base class for all errors raised by this package."""


# --- APK container / parsing ---

class NotZip(AuditError):
    """The file is not a ZIP container."""


class MissingManifest(AuditError):
    """The APK has no AndroidManifest.xml entry."""


class MalformedAxml(AuditError):
    """Binary (or plain-text) manifest could not be decoded."""


class MalformedDex(AuditError):
    """DEX blob fails structural validation (magic, table offsets)."""


# --- signature database ---

class DuplicateName(AuditError):
    """Two signature entries share the same tracker name."""


class EmptySignature(AuditError):
    """A signature entry has neither code nor network signatures."""


class UnknownTracker(AuditError):
    """A tracker name was referenced that is absent from the database."""


# --- flow logs ---

class MalformedRecord(AuditError):
    """A flow-log record is missing a required field."""


# --- age ratings ---

class UnknownLabel(AuditError):
    """(authority, label) pair absent from the age-group table."""


class InsufficientRatings(AuditError):
    """Fewer than two distinct authorities rated the app."""


# --- comment pipeline ---

class EmptyVocabulary(AuditError):
    """No terms survive preprocessing/stopword removal."""


class KTooLarge(AuditError):
    """Requested k exceeds the number of distinct vectors."""


class NoValidK(AuditError):
    """No grid value is valid for the corpus size."""


class EmptyKeywordSet(AuditError):
    """Rule induction was given no keywords for a topic."""
