def group_by_email(assets):
    groups = {}
    for asset in assets:
        groups.setdefault(asset.email, []).append(asset)
    return groups
