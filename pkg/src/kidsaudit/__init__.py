"""Offline privacy/policy audit pipeline for children's mobile apps.

Static APK analysis (permissions, tracker code signatures), decoded
network-flow PII detection, cross-territory content age rating
consistency, and rule-based complaint mining over user reviews.
"""

__version__ = "0.1.0"

from .errors import AuditError

__all__ = ["AuditError", "__version__"]
