def group_by_name(products):
    groups = {}
    for product in products:
        groups.setdefault(product.name, []).append(product)
    return groups
