"""APK container handling: manifest permissions and DEX class index.

Only the two static-analysis inputs are extracted — the binary
manifest and the classesN.dex blobs.  No decompilation, no resource
or asset extraction.
"""
from __future__ import annotations

import re
import xml.etree.ElementTree as ET
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from . import axml, dex
from .errors import MalformedAxml, MissingManifest, NotZip

ANDROID_NS = "http://schemas.android.com/apk/res/android"

_DEX_NAME = re.compile(r"^classes(\d*)\.dex$")


@dataclass
class ApkArchive:
    """An opened APK: its entry listing plus the raw static-analysis inputs."""
    path: Path
    entries: list[tuple[str, int]]
    manifest_bytes: bytes
    dex_blobs: list[bytes]


@dataclass
class ManifestInfo:
    package_name: str
    permissions: set[str]
    min_sdk: int | None = None
    target_sdk: int | None = None


@dataclass
class DexClassIndex:
    """Normalized '/'-separated class descriptors across all DEX blobs."""
    class_paths: set[str] = field(default_factory=set)


def open_apk(path: str | Path) -> ApkArchive:
    """Open an APK and locate the manifest and all classesN.dex blobs.

    Raises NotZip if the file is not a ZIP container, MissingManifest
    if it has no AndroidManifest.xml entry.
    """
    path = Path(path)
    try:
        zf = zipfile.ZipFile(path)
    except (zipfile.BadZipFile, OSError) as exc:
        raise NotZip(f"{path}: not a ZIP container") from exc

    with zf:
        entries = [(info.filename, info.file_size) for info in zf.infolist()]
        names = {name for name, _ in entries}
        if "AndroidManifest.xml" not in names:
            raise MissingManifest(f"{path}: no AndroidManifest.xml entry")
        manifest_bytes = zf.read("AndroidManifest.xml")

        # classes.dex first, then classes2.dex, classes3.dex, ...
        dex_names = []
        for name in names:
            m = _DEX_NAME.match(name)
            if m:
                dex_names.append((int(m.group(1) or "1"), name))
        dex_blobs = [zf.read(name) for _, name in sorted(dex_names)]

    return ApkArchive(path=path, entries=entries,
                      manifest_bytes=manifest_bytes, dex_blobs=dex_blobs)


def _manifest_attr(elem: ET.Element, name: str) -> str | None:
    v = elem.get("{%s}%s" % (ANDROID_NS, name))
    if v is None:
        v = elem.get(name)
    return v


def _int_or_none(v: str | None) -> int | None:
    if v is None:
        return None
    try:
        return int(v)
    except ValueError:
        return None


def decode_manifest(data: bytes) -> ManifestInfo:
    """Extract package name, permissions and SDK levels from a manifest.

    Accepts Android binary XML (the on-device encoding) and, as a
    fixture convenience, plain-text XML.  Raises MalformedAxml when
    neither can be decoded.
    """
    if axml.looks_like_axml(data):
        root = axml.parse_axml(data)
    else:
        try:
            root = ET.fromstring(data.decode("utf-8"))
        except (ET.ParseError, UnicodeDecodeError, ValueError) as exc:
            raise MalformedAxml("manifest is neither AXML nor XML") from exc

    tag = root.tag.rsplit("}", 1)[-1]
    if tag != "manifest":
        raise MalformedAxml(f"root element is <{tag}>, expected <manifest>")
    package = _manifest_attr(root, "package") or ""
    if not package:
        raise MalformedAxml("manifest has no package attribute")

    permissions = set()
    min_sdk = target_sdk = None
    for elem in root.iter():
        etag = elem.tag.rsplit("}", 1)[-1]
        if etag == "uses-permission":
            name = _manifest_attr(elem, "name")
            if name:
                permissions.add(name)
        elif etag == "uses-sdk":
            min_sdk = _int_or_none(_manifest_attr(elem, "minSdkVersion"))
            target_sdk = _int_or_none(_manifest_attr(elem, "targetSdkVersion"))

    return ManifestInfo(package_name=package, permissions=permissions,
                        min_sdk=min_sdk, target_sdk=target_sdk)


def index_classes(dex_blobs: list[bytes]) -> DexClassIndex:
    """Union of normalized class descriptors over all DEX blobs.

    Order-insensitive and idempotent; raises MalformedDex on a
    structurally invalid blob.
    """
    paths: set[str] = set()
    for blob in dex_blobs:
        paths |= dex.class_descriptors(blob)
    return DexClassIndex(class_paths=paths)
