def max_quantity(products):
    return max(product.quantity for product in products)
