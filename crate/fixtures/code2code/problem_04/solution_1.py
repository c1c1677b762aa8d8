def bucket_products(products):
    buckets = defaultdict(list)
    for product in products:
        buckets[product.name].append(product)
    return dict(buckets)
