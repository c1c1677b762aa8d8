def highest_quantity(products):
    best = None
    for product in products:
        if best is None or product.quantity > best:
            best = product.quantity
    return best
