import pytest

from kidsaudit.apk import ManifestInfo
from kidsaudit.errors import UnknownTracker
from kidsaudit.policy import (Audience, AppMetadata, FindingCode, Severity,
                              audit_location, audit_trackers,
                              filter_google_facebook)

FINE = "android.permission.ACCESS_FINE_LOCATION"
COARSE = "android.permission.ACCESS_COARSE_LOCATION"


def manifest(*perms):
    return ManifestInfo(package_name="com.x", permissions=set(perms))


def family(pkg="com.x"):
    return AppMetadata(package_name=pkg, audience=Audience.FAMILY_DESIGNED)


def normal(pkg="com.x"):
    return AppMetadata(package_name=pkg, audience=Audience.INCLUDES_CHILDREN)


class TestAuditLocation:
    def test_family_fine_location_violation(self):
        findings = audit_location(manifest(FINE), family())
        assert len(findings) == 1
        f = findings[0]
        assert f.code is FindingCode.LOCATION_PERMISSION_FAMILY
        assert f.severity is Severity.VIOLATION
        assert f.evidence == [FINE]

    def test_family_clean(self):
        assert audit_location(manifest("android.permission.INTERNET"),
                              family()) == []

    def test_normal_both_permissions_warning(self):
        findings = audit_location(manifest(FINE, COARSE), normal())
        assert len(findings) == 1
        f = findings[0]
        assert f.code is FindingCode.LOCATION_PERMISSION_CHILD_TARGET
        assert f.severity is Severity.WARNING
        assert len(f.evidence) == 2

    def test_deterministic(self):
        a = audit_location(manifest(FINE, COARSE), family())
        b = audit_location(manifest(COARSE, FINE), family())
        assert a == b

    def test_family_dominates_normal_severity(self):
        fam = audit_location(manifest(FINE), family())[0]
        nor = audit_location(manifest(FINE), normal())[0]
        assert fam.evidence == nor.evidence
        assert fam.severity is Severity.VIOLATION
        assert nor.severity is Severity.WARNING


class TestAuditTrackers:
    def test_family_certified_only_clean(self, default_db):
        findings = audit_trackers({"Google AdMob"}, family(), default_db)
        assert not [f for f in findings
                    if f.code is FindingCode.NON_CERTIFIED_SDK_FAMILY]

    def test_family_appsflyer_violation(self, default_db):
        findings = audit_trackers({"AppsFlyer"}, family(), default_db)
        assert len(findings) == 1
        f = findings[0]
        assert f.code is FindingCode.NON_CERTIFIED_SDK_FAMILY
        assert f.severity is Severity.VIOLATION
        assert f.evidence == ["AppsFlyer"]

    def test_normal_non_certified_warning(self, default_db):
        findings = audit_trackers({"AppsFlyer"}, normal(), default_db)
        assert findings[0].code is FindingCode.NON_CERTIFIED_SDK_CHILD_TARGET
        assert findings[0].severity is Severity.WARNING

    def test_excessive_trackers(self, default_db):
        eleven = sorted(default_db.non_certified())[:11]
        findings = audit_trackers(set(eleven), normal(), default_db)
        codes = {f.code for f in findings}
        assert FindingCode.EXCESSIVE_TRACKERS in codes

    def test_below_threshold_no_excessive(self, default_db):
        five = sorted(default_db.non_certified())[:5]
        findings = audit_trackers(set(five), normal(), default_db)
        assert FindingCode.EXCESSIVE_TRACKERS not in {f.code for f in findings}

    def test_all_certified_no_family_violation(self, default_db):
        findings = audit_trackers(default_db.certified(), family(),
                                  default_db)
        assert FindingCode.NON_CERTIFIED_SDK_FAMILY not in \
            {f.code for f in findings}

    def test_unknown_tracker(self, default_db):
        with pytest.raises(UnknownTracker):
            audit_trackers({"NotARealTracker"}, family(), default_db)

    def test_deterministic_order(self, default_db):
        names = set(sorted(default_db.non_certified())[:4])
        a = audit_trackers(names, family(), default_db)
        b = audit_trackers(set(reversed(sorted(names))), family(), default_db)
        assert a == b


class TestGoogleFacebookFilter:
    def test_filter_drops_vendors(self, default_db):
        matched = {"Google Firebase Analytics", "Facebook", "AppsFlyer"}
        assert filter_google_facebook(matched, default_db) == {"AppsFlyer"}
