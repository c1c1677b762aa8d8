def bucket_assets(assets):
    buckets = defaultdict(list)
    for asset in assets:
        buckets[asset.email].append(asset)
    return dict(buckets)
